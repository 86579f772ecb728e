#pragma once

#include <vector>

#include "mrst/core/image.hpp"
#include "mrst/recon/solver.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst {

/// Edge-preserving potential phi(t) = delta^2 (|t/delta| - log(1 + |t/delta|)).
double ep_potential(double t, double delta);
/// phi'(t) = t / (1 + |t| / delta)
double ep_potential_derivative(double t, double delta);
/// phi''(t) = 1 / (1 + |t| / delta)^2, bounded by 1.
double ep_potential_curvature(double t, double delta);

/// kappa_j = sqrt(sum_i a_ij^2 w_i / sum_i a_ij^2); zero for pixels no ray crosses.
Image noise_uniformity_weights(const Sinogram& sino, const Grid& grid);

/// beta * sum_j sum_{k in N_j} kappa_j kappa_k phi(x_j - x_k) over the
/// 8-neighbourhood, each unordered pair counted once.
class EdgePreservingPenalty final : public SmoothPenalty {
public:
    EdgePreservingPenalty(Image kappa, double beta, double delta);

    double value(const Image& x) const;
    Image gradient(const Image& x) const override;
    /// 2 beta sum_{k in full 8-neighbourhood} kappa_j kappa_k (phi'' <= 1).
    const Image& majorizer() const override { return majorizer_; }

private:
    Image kappa_;
    double beta_;
    double delta_;
    Image majorizer_;
};

struct EpConfig {
    double beta = 1.0;
    double delta = 10.0;  // HU
    int iters = 50;
    int subsets = 6;
    SolverKind solver = SolverKind::oslalm;
    bool track_objective = true;
};

void validate_ep_config(const EpConfig& cfg);

struct EpResult {
    Image image;
    std::vector<double> objective;  // after each iteration, when tracked
};

/// PWLS-EP: minimizes 1/2 ||y - c A x||_W^2 + R_EP(x) over x >= 0 starting from x0.
EpResult reconstruct_ep(const Sinogram& sino, const EpConfig& cfg, const Image& x0);

}  // namespace mrst
