#pragma once

#include "mrst/core/image.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst {

enum class FbpWindow { ramp, hanning };

/// Parallel-beam filtered backprojection onto `grid`: ramp filter (built from
/// the band-limited spatial kernel) apodized by the window, linear detector
/// interpolation, pi / n_views angular weight. Returns modified HU.
/// Throws UnsupportedGeometryError for fan-beam data.
Image fbp(const Sinogram& sino, const Grid& grid, FbpWindow window = FbpWindow::hanning);

/// Same on raw line integrals; returns mm^-1.
Image fbp_mu(const Projections& y, const Geometry& geom, const Grid& grid, FbpWindow window);

}  // namespace mrst
