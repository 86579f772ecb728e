#include "mrst/recon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrst/core/errors.hpp"

namespace mrst {

ImageSolver::ImageSolver(const DataTerm& data, SolverKind kind) : data_(&data), kind_(kind) {}

double ImageSolver::rho(long long k, double alpha) {
    if (k == 0) return 1.0;
    const double t = std::numbers::pi / (alpha * static_cast<double>(k + 1));
    return t * std::sqrt(1.0 - 0.25 * t * t);
}

void ImageSolver::run(Image& x, const SmoothPenalty& penalty, int passes) {
    require(passes >= 1, "solver: passes must be >= 1");
    require(x.grid() == data_->grid(), "solver: image grid mismatch");
    require(penalty.majorizer().grid() == data_->grid(), "solver: penalty grid mismatch");
    for (auto& v : x.values()) v = std::max(v, 0.0);
    for (int pass = 0; pass < passes; ++pass)
        for (int m = 0; m < data_->subsets(); ++m) {
            if (kind_ == SolverKind::mm)
                mm_step(x, penalty, m);
            else
                lalm_step(x, penalty, m);
            ++k_;
        }
}

void ImageSolver::mm_step(Image& x, const SmoothPenalty& penalty, int m) {
    const Image gl = data_->subset_gradient(x, m);
    const Image gr = penalty.gradient(x);
    const Image& dl = data_->majorizer();
    const Image& dr = penalty.majorizer();
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = dl[j] + dr[j];
        if (d > 0.0) x[j] = std::max(0.0, x[j] - (gl[j] + gr[j]) / d);
    }
}

// Relaxed OS-LALM: g and h track the (subset-approximated) data gradient and
// the linearization point; only the penalty enters through its own majorizer.
void ImageSolver::lalm_step(Image& x, const SmoothPenalty& penalty, int m) {
    const Image& dl = data_->majorizer();
    const Image& dr = penalty.majorizer();
    if (!initialized_) {
        g_ = data_->gradient(x);
        h_ = Image(x.grid());
        for (std::size_t j = 0; j < x.size(); ++j) h_[j] = dl[j] * x[j] - g_[j];
        initialized_ = true;
    }
    const double alpha = kRelaxation;
    const double r = rho(k_, alpha);
    const Image gr = penalty.gradient(x);
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double s = r * (dl[j] * x[j] - h_[j]) + (1.0 - r) * g_[j];
        const double d = r * dl[j] + dr[j];
        if (d > 0.0) x[j] = std::max(0.0, x[j] - (s + gr[j]) / d);
    }
    const Image zeta = data_->subset_gradient(x, m);
    for (std::size_t j = 0; j < x.size(); ++j) {
        g_[j] = (r * (alpha * zeta[j] + (1.0 - alpha) * g_[j]) + g_[j]) / (r + 1.0);
        h_[j] = alpha * (dl[j] * x[j] - zeta[j]) + (1.0 - alpha) * h_[j];
    }
}

}  // namespace mrst
