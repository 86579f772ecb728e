#pragma once

#include <optional>
#include <vector>

#include "mrst/core/image.hpp"

namespace mrst {

struct RoiMask {
    int width = 0;
    int height = 0;
    std::vector<bool> inside;
    std::size_t count = 0;
};

/// Pixels whose centre lies within radius_fraction * min(width, height) / 2
/// (in pixels) of the image centre. 0 < radius_fraction <= 1.
RoiMask circular_roi(int width, int height, double radius_fraction);

/// Root mean squared difference over ROI pixels.
double rmse(const Image& estimate, const Image& truth, const RoiMask& roi);

/// 20 log10(peak / rmse). The peak defaults to the ground-truth maximum over
/// the ROI. Returns +inf when rmse is zero.
double psnr(const Image& estimate, const Image& truth, const RoiMask& roi, std::optional<double> peak = {});
double psnr_from_rmse(double rmse_value, double peak);

/// Averages factor x factor blocks (pixel-area downsampling), e.g. to compare a
/// fine-grid truth with a coarser reconstruction grid.
Image downsample_area(const Image& img, int factor);

}  // namespace mrst
