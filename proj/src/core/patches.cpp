#include "mrst/core/patches.hpp"

#include <string>

#include "mrst/core/errors.hpp"

namespace mrst {

namespace {

int wrap_index(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

// Grid index of the patch whose origin along one axis is `origin`, or -1.
int origin_to_index(int origin, int stride, int count) {
    if (origin < 0 || origin % stride != 0) return -1;
    const int g = origin / stride;
    return g < count ? g : -1;
}

template <typename Visit>
void for_each_cover(const PatchConfig& cfg, const PatchGrid& pg, int width, int height, int px, int py,
                    Visit&& visit) {
    const bool wrap = cfg.boundary == Boundary::wrap;
    for (int dy = 0; dy < cfg.patch_h; ++dy) {
        int oy = py - dy;
        if (wrap) oy = wrap_index(oy, height);
        const int gy = origin_to_index(oy, cfg.stride_y, pg.count_y);
        if (gy < 0) continue;
        for (int dx = 0; dx < cfg.patch_w; ++dx) {
            int ox = px - dx;
            if (wrap) ox = wrap_index(ox, width);
            const int gx = origin_to_index(ox, cfg.stride_x, pg.count_x);
            if (gx < 0) continue;
            visit(dy * cfg.patch_w + dx, gy * pg.count_x + gx);
        }
    }
}

}  // namespace

void validate_patch_config(const PatchConfig& cfg, int width, int height) {
    require(cfg.patch_w >= 1 && cfg.patch_h >= 1, "patch dimensions must be >= 1");
    require(cfg.stride_x >= 1 && cfg.stride_y >= 1, "patch strides must be >= 1");
    require(width >= 1 && height >= 1, "image dimensions must be >= 1");
    if (cfg.boundary == Boundary::clip) {
        require(cfg.patch_w <= width && cfg.patch_h <= height,
                "patch " + std::to_string(cfg.patch_w) + "x" + std::to_string(cfg.patch_h) +
                    " larger than image " + std::to_string(width) + "x" + std::to_string(height) +
                    " in clip mode");
    }
}

PatchGrid patch_grid(const PatchConfig& cfg, int width, int height) {
    validate_patch_config(cfg, width, height);
    if (cfg.boundary == Boundary::clip) {
        return {(width - cfg.patch_w) / cfg.stride_x + 1, (height - cfg.patch_h) / cfg.stride_y + 1};
    }
    return {(width + cfg.stride_x - 1) / cfg.stride_x, (height + cfg.stride_y - 1) / cfg.stride_y};
}

PatchSet extract_patches(const Image& img, const PatchConfig& cfg) {
    const int w = img.width();
    const int h = img.height();
    const PatchGrid pg = patch_grid(cfg, w, h);
    PatchSet out{Matrix(cfg.dim(), pg.total()), cfg, w, h};
    const bool wrap = cfg.boundary == Boundary::wrap;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < pg.total(); ++j) {
        const int ox = (j % pg.count_x) * cfg.stride_x;
        const int oy = (j / pg.count_x) * cfg.stride_y;
        double* col = out.data.col(j).data();
        for (int dy = 0; dy < cfg.patch_h; ++dy) {
            const int y = wrap ? wrap_index(oy + dy, h) : oy + dy;
            for (int dx = 0; dx < cfg.patch_w; ++dx) {
                const int x = wrap ? wrap_index(ox + dx, w) : ox + dx;
                col[dy * cfg.patch_w + dx] = img(x, y);
            }
        }
    }
    return out;
}

Image aggregate_patches(const Matrix& patches, const PatchConfig& cfg, const Grid& grid) {
    const PatchGrid pg = patch_grid(cfg, grid.width, grid.height);
    require(patches.rows() == cfg.dim() && patches.cols() == pg.total(),
            "aggregate_patches: matrix is " + std::to_string(patches.rows()) + "x" +
                std::to_string(patches.cols()) + ", expected " + std::to_string(cfg.dim()) + "x" +
                std::to_string(pg.total()));
    Image out(grid);
#pragma omp parallel for schedule(static)
    for (int py = 0; py < grid.height; ++py) {
        for (int px = 0; px < grid.width; ++px) {
            double acc = 0.0;
            for_each_cover(cfg, pg, grid.width, grid.height, px, py,
                           [&](int row, int j) { acc += patches(row, j); });
            out(px, py) = acc;
        }
    }
    return out;
}

Image patch_coverage(const PatchConfig& cfg, const Grid& grid) {
    const PatchGrid pg = patch_grid(cfg, grid.width, grid.height);
    Image out(grid);
#pragma omp parallel for schedule(static)
    for (int py = 0; py < grid.height; ++py) {
        for (int px = 0; px < grid.width; ++px) {
            int count = 0;
            for_each_cover(cfg, pg, grid.width, grid.height, px, py, [&](int, int) { ++count; });
            out(px, py) = count;
        }
    }
    return out;
}

namespace serial {

PatchSet extract_patches(const Image& img, const PatchConfig& cfg) {
    const int w = img.width();
    const int h = img.height();
    const PatchGrid pg = patch_grid(cfg, w, h);
    PatchSet out{Matrix(cfg.dim(), pg.total()), cfg, w, h};
    for (int j = 0; j < pg.total(); ++j) {
        const int ox = (j % pg.count_x) * cfg.stride_x;
        const int oy = (j / pg.count_x) * cfg.stride_y;
        for (int dy = 0; dy < cfg.patch_h; ++dy)
            for (int dx = 0; dx < cfg.patch_w; ++dx)
                out.data(dy * cfg.patch_w + dx, j) =
                    img(wrap_index(ox + dx, w), wrap_index(oy + dy, h));
    }
    return out;
}

Image aggregate_patches(const Matrix& patches, const PatchConfig& cfg, const Grid& grid) {
    const PatchGrid pg = patch_grid(cfg, grid.width, grid.height);
    require(patches.rows() == cfg.dim() && patches.cols() == pg.total(), "aggregate_patches: shape mismatch");
    Image out(grid);
    for (int j = 0; j < pg.total(); ++j) {
        const int ox = (j % pg.count_x) * cfg.stride_x;
        const int oy = (j / pg.count_x) * cfg.stride_y;
        for (int dy = 0; dy < cfg.patch_h; ++dy)
            for (int dx = 0; dx < cfg.patch_w; ++dx)
                out(wrap_index(ox + dx, grid.width), wrap_index(oy + dy, grid.height)) +=
                    patches(dy * cfg.patch_w + dx, j);
    }
    return out;
}

}  // namespace serial
}  // namespace mrst
