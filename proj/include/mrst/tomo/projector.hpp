#pragma once

#include <span>
#include <vector>

#include "mrst/core/image.hpp"
#include "mrst/tomo/geometry.hpp"

namespace mrst {

// Ray-driven projector with exact ray/pixel intersection lengths (Siddon),
// one ray per detector bin centre. Images are attenuation in mm^-1, so
// projections are unitless line integrals. The back projector applies the
// same weights transposed, so the pair is an exact adjoint.

/// Calls visit(pixel_index, length_mm) for every pixel the ray (view, bin) crosses,
/// in order along the ray.
template <typename Visit>
void trace_ray(const Grid& grid, const Geometry& geom, int view, int bin, Visit&& visit);

Projections forward_project(const Image& mu, const Geometry& geom);
Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid);

/// Subset variants: only the listed views are projected / accumulated.
/// Rows of `out` for other views are left untouched.
void forward_project(const Image& mu, const Geometry& geom, std::span<const int> views, Projections& out);
Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid, std::span<const int> views);

/// sum_i a_ij^2 u_i
Image back_project_squared(const Projections& u, const Geometry& geom, const Grid& grid);

/// diag{A^T W A 1}: majorizes A^T W A since A is elementwise nonnegative.
Image data_majorizer(const Geometry& geom, const Projections& weights, const Grid& grid);

/// View indices {m, m + M, m + 2M, ...} for subset m of M.
std::vector<std::vector<int>> ordered_subsets(int n_views, int subsets);

namespace serial {
Projections forward_project(const Image& mu, const Geometry& geom);
/// Accumulates every ray into one image in (view, bin) order.
Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid);
}  // namespace serial

}  // namespace mrst

#include "mrst/tomo/trace_impl.hpp"
