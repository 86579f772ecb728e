#include "mrst/core/image.hpp"

#include <cmath>
#include <string>

#include "mrst/core/errors.hpp"

namespace mrst {

void validate_grid(const Grid& g) {
    require(g.width >= 1 && g.height >= 1, "image dimensions must be >= 1");
    require(g.pixel_size_x > 0.0 && g.pixel_size_y > 0.0 && std::isfinite(g.pixel_size_x) &&
                std::isfinite(g.pixel_size_y),
            "pixel sizes must be positive and finite");
}

Image::Image(Grid grid, double fill) : grid_(grid) {
    validate_grid(grid_);
    data_.assign(grid_.size(), fill);
}

Image::Image(Grid grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
    validate_grid(grid_);
    require(data_.size() == grid_.size(), "image data length " + std::to_string(data_.size()) +
                                              " does not match " + std::to_string(grid_.width) + "x" +
                                              std::to_string(grid_.height));
}

void Image::validate() const {
    validate_grid(grid_);
    require(data_.size() == grid_.size(), "image data length does not match its grid");
    for (double v : data_) require(std::isfinite(v), "image contains non-finite values");
}

double dot(const Image& a, const Image& b) {
    require(a.grid().width == b.grid().width && a.grid().height == b.grid().height, "image size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace mrst
