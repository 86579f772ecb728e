#include "mrst/recon/data_term.hpp"

#include <numeric>

#include "mrst/core/errors.hpp"
#include "mrst/sim/simulate.hpp"
#include "mrst/tomo/projector.hpp"

namespace mrst {

DataTerm::DataTerm(const Sinogram& sino, const Grid& grid, int subsets)
    : sino_(&sino), grid_(grid), subsets_(ordered_subsets(sino.geometry.n_views, subsets)) {
    validate_sinogram(sino);
    validate_grid(grid);
    all_views_.resize(static_cast<std::size_t>(sino.geometry.n_views));
    std::iota(all_views_.begin(), all_views_.end(), 0);
    majorizer_ = data_majorizer(sino.geometry, sino.weights, grid);
    for (auto& v : majorizer_.values()) v *= kHuToMu * kHuToMu;
}

double DataTerm::value(const Image& x) const {
    require(x.grid() == grid_, "data term: image grid mismatch");
    const Projections ax = forward_project(x, sino_->geometry);
    double s = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double r = sino_->y[i] - kHuToMu * ax[i];
        s += sino_->weights[i] * r * r;
    }
    return 0.5 * s;
}

Image DataTerm::subset_gradient_impl(const Image& x, const std::vector<int>& views, double scale) const {
    require(x.grid() == grid_, "data term: image grid mismatch");
    const Geometry& g = sino_->geometry;
    Projections r(g.n_views, g.n_det);
    forward_project(x, g, views, r);
    for (int v : views) {
        auto rv = r.row(v);
        const auto yv = sino_->y.row(v);
        const auto wv = sino_->weights.row(v);
        for (int b = 0; b < g.n_det; ++b) rv[b] = wv[b] * (kHuToMu * rv[b] - yv[b]);
    }
    Image grad = back_project(r, g, grid_, views);
    const double c = scale * kHuToMu;
    for (auto& v : grad.values()) v *= c;
    return grad;
}

Image DataTerm::gradient(const Image& x) const { return subset_gradient_impl(x, all_views_, 1.0); }

Image DataTerm::subset_gradient(const Image& x, int m) const {
    require(m >= 0 && m < subsets(), "subset index out of range");
    if (subsets() == 1) return gradient(x);
    return subset_gradient_impl(x, subsets_[static_cast<std::size_t>(m)], static_cast<double>(subsets()));
}

}  // namespace mrst
