#pragma once

#include "mrst/core/image.hpp"
#include "mrst/core/matrix.hpp"

namespace mrst {

enum class Boundary { clip, wrap };

struct PatchConfig {
    int patch_w = 8;
    int patch_h = 8;
    int stride_x = 1;
    int stride_y = 1;
    Boundary boundary = Boundary::clip;

    int dim() const { return patch_w * patch_h; }
    bool operator==(const PatchConfig&) const = default;
};

/// Patch origins along the two image axes for a given config.
struct PatchGrid {
    int count_x = 0;
    int count_y = 0;
    int total() const { return count_x * count_y; }
};

/// Throws ArgumentError if cfg cannot be applied to an image of the given size.
void validate_patch_config(const PatchConfig& cfg, int width, int height);

/// Patch j = gy * count_x + gx has origin (gx * stride_x, gy * stride_y).
/// Clip: only patches fully inside the image. Wrap: one origin per stride step,
/// pixel indices taken modulo the image size.
PatchGrid patch_grid(const PatchConfig& cfg, int width, int height);

/// Columns are vectorized patches; entries within a patch are row-major.
struct PatchSet {
    Matrix data;
    PatchConfig config;
    int source_width = 0;
    int source_height = 0;

    int dim() const { return static_cast<int>(data.rows()); }
    int count() const { return static_cast<int>(data.cols()); }
};

/// Applies all P^j at once.
PatchSet extract_patches(const Image& img, const PatchConfig& cfg);

/// sum_j (P^j)^T y_j, the exact adjoint of extract_patches. Each output pixel
/// is gathered from its covering patches in a fixed order, so the result does
/// not depend on the worker count.
Image aggregate_patches(const Matrix& patches, const PatchConfig& cfg, const Grid& grid);

/// Diagonal of sum_j (P^j)^T P^j.
Image patch_coverage(const PatchConfig& cfg, const Grid& grid);

namespace serial {
PatchSet extract_patches(const Image& img, const PatchConfig& cfg);
/// Scatter-add reference for aggregate_patches.
Image aggregate_patches(const Matrix& patches, const PatchConfig& cfg, const Grid& grid);
}  // namespace serial

}  // namespace mrst
