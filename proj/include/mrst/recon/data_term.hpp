#pragma once

#include <vector>

#include "mrst/core/image.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst {

/// L(x) = 1/2 ||y - c A x||_W^2 for an image x in modified HU, where c converts
/// HU to mm^-1. Views are split into ordered subsets by index stride.
class DataTerm {
public:
    DataTerm(const Sinogram& sino, const Grid& grid, int subsets = 1);

    const Grid& grid() const { return grid_; }
    const Sinogram& sinogram() const { return *sino_; }
    int subsets() const { return static_cast<int>(subsets_.size()); }

    double value(const Image& x) const;
    /// c A^T W (c A x - y)
    Image gradient(const Image& x) const;
    /// M c A_m^T W_m (c A_m x - y_m), an approximation of the full gradient.
    Image subset_gradient(const Image& x, int m) const;
    /// Diagonal majorizer c^2 A^T W A 1 of the Hessian.
    const Image& majorizer() const { return majorizer_; }

private:
    Image subset_gradient_impl(const Image& x, const std::vector<int>& views, double scale) const;

    const Sinogram* sino_;
    Grid grid_;
    std::vector<std::vector<int>> subsets_;
    std::vector<int> all_views_;
    Image majorizer_;
};

}  // namespace mrst
