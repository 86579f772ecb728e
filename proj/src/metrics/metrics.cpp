#include "mrst/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrst/core/errors.hpp"

namespace mrst {

RoiMask circular_roi(int width, int height, double radius_fraction) {
    require(width >= 1 && height >= 1, "ROI dimensions must be >= 1");
    require(radius_fraction > 0.0 && radius_fraction <= 1.0, "ROI radius fraction must be in (0, 1]");
    RoiMask roi{width, height, std::vector<bool>(static_cast<std::size_t>(width) * height, false), 0};
    const double r = radius_fraction * 0.5 * std::min(width, height);
    const double cx = 0.5 * (width - 1);
    const double cy = 0.5 * (height - 1);
    for (int row = 0; row < height; ++row)
        for (int col = 0; col < width; ++col) {
            const double dx = col - cx;
            const double dy = row - cy;
            if (dx * dx + dy * dy <= r * r) {
                roi.inside[static_cast<std::size_t>(row) * width + col] = true;
                ++roi.count;
            }
        }
    require(roi.count >= 1, "ROI contains no pixels");
    return roi;
}

namespace {

void check_roi(const Image& a, const Image& b, const RoiMask& roi) {
    require(a.width() == b.width() && a.height() == b.height(), "metric: image dimensions differ");
    require(roi.width == a.width() && roi.height == a.height(), "metric: ROI dimensions differ from image");
    require(roi.count >= 1, "metric: empty ROI");
}

}  // namespace

double rmse(const Image& estimate, const Image& truth, const RoiMask& roi) {
    check_roi(estimate, truth, roi);
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        if (!roi.inside[i]) continue;
        const double d = estimate[i] - truth[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(roi.count));
}

double psnr_from_rmse(double rmse_value, double peak) {
    require(peak > 0.0, "PSNR peak must be positive");
    require(rmse_value >= 0.0, "RMSE must be nonnegative");
    if (rmse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak / rmse_value);
}

double psnr(const Image& estimate, const Image& truth, const RoiMask& roi, std::optional<double> peak) {
    check_roi(estimate, truth, roi);
    double pk = 0.0;
    if (peak) {
        pk = *peak;
    } else {
        pk = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < truth.size(); ++i)
            if (roi.inside[i]) pk = std::max(pk, truth[i]);
    }
    return psnr_from_rmse(rmse(estimate, truth, roi), pk);
}

Image downsample_area(const Image& img, int factor) {
    require(factor >= 1, "downsample factor must be >= 1");
    require(img.width() % factor == 0 && img.height() % factor == 0, "image size not divisible by factor");
    Grid g{img.width() / factor, img.height() / factor, img.grid().pixel_size_x * factor,
           img.grid().pixel_size_y * factor};
    Image out(g);
    const double inv = 1.0 / (static_cast<double>(factor) * factor);
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col) {
            double s = 0.0;
            for (int dy = 0; dy < factor; ++dy)
                for (int dx = 0; dx < factor; ++dx) s += img(col * factor + dx, row * factor + dy);
            out(col, row) = s * inv;
        }
    return out;
}

}  // namespace mrst
