#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mrst {

/// Pixel grid of an image: dimensions in pixels and pixel size in mm.
struct Grid {
    int width = 0;
    int height = 0;
    double pixel_size_x = 1.0;
    double pixel_size_y = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    bool operator==(const Grid&) const = default;
};

/// 2D image stored row-major (row 0 at the top, +y up). Values are modified HU
/// unless a function says otherwise (the tomo layer works in mm^-1).
///
/// The grid is centred on the isocenter: pixel (col, row) has centre
///   x = (col - (width - 1) / 2) * pixel_size_x
///   y = ((height - 1) / 2 - row) * pixel_size_y
class Image {
public:
    Image() = default;
    explicit Image(Grid grid, double fill = 0.0);
    Image(Grid grid, std::vector<double> data);

    const Grid& grid() const { return grid_; }
    int width() const { return grid_.width; }
    int height() const { return grid_.height; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int col, int row) { return data_[index(col, row)]; }
    double operator()(int col, int row) const { return data_[index(col, row)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    double pixel_x(int col) const { return (col - 0.5 * (grid_.width - 1)) * grid_.pixel_size_x; }
    double pixel_y(int row) const { return (0.5 * (grid_.height - 1) - row) * grid_.pixel_size_y; }

    /// Throws ArgumentError unless dims and pixel sizes are valid and all values finite.
    void validate() const;

    bool operator==(const Image&) const = default;

private:
    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_.width) + static_cast<std::size_t>(col);
    }

    Grid grid_;
    std::vector<double> data_;
};

void validate_grid(const Grid& g);

double dot(const Image& a, const Image& b);

}  // namespace mrst
