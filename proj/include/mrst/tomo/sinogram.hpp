#pragma once

#include <filesystem>
#include <iosfwd>

#include "mrst/tomo/geometry.hpp"

namespace mrst {

/// Post-log measurements y with the diagonal of the statistical weighting W.
struct Sinogram {
    Geometry geometry;
    Projections y;
    Projections weights;

    bool operator==(const Sinogram&) const = default;
};

/// Throws ArgumentError on shape mismatch, negative weights, or non-finite values.
void validate_sinogram(const Sinogram& s);

/// "MRSTSIN1": magic, u8 kind, u32 n_views, u32 n_det, f64 det_spacing, f64 dso,
/// f64 dsd (zeros for parallel), then y and weights, each row-major f64.
void write_sinogram(std::ostream& os, const Sinogram& s);
Sinogram read_sinogram(std::istream& is);
void save_sinogram(const std::filesystem::path& path, const Sinogram& s);
Sinogram load_sinogram(const std::filesystem::path& path);

}  // namespace mrst
