#include "mrst/recon/ep.hpp"

#include <cmath>

#include "mrst/core/errors.hpp"
#include "mrst/tomo/projector.hpp"

namespace mrst {

namespace {

// Forward half of the 8-neighbourhood; the other half is reached from the neighbour.
constexpr int kOffsets[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};

bool inside(const Grid& g, int col, int row) { return col >= 0 && col < g.width && row >= 0 && row < g.height; }

}  // namespace

double ep_potential(double t, double delta) {
    const double a = std::abs(t / delta);
    return delta * delta * (a - std::log1p(a));
}

double ep_potential_derivative(double t, double delta) { return t / (1.0 + std::abs(t) / delta); }

double ep_potential_curvature(double t, double delta) {
    const double d = 1.0 + std::abs(t) / delta;
    return 1.0 / (d * d);
}

Image noise_uniformity_weights(const Sinogram& sino, const Grid& grid) {
    validate_sinogram(sino);
    const Image num = back_project_squared(sino.weights, sino.geometry, grid);
    const Image den = back_project_squared(Projections(sino.geometry.n_views, sino.geometry.n_det, 1.0),
                                           sino.geometry, grid);
    Image kappa(grid);
    for (std::size_t j = 0; j < kappa.size(); ++j) kappa[j] = den[j] > 0.0 ? std::sqrt(num[j] / den[j]) : 0.0;
    return kappa;
}

EdgePreservingPenalty::EdgePreservingPenalty(Image kappa, double beta, double delta)
    : kappa_(std::move(kappa)), beta_(beta), delta_(delta), majorizer_(kappa_.grid()) {
    require(beta >= 0.0, "EP: beta must be nonnegative");
    require(delta > 0.0, "EP: delta must be positive");
    const Grid& g = kappa_.grid();
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col) {
            double s = 0.0;
            for (const auto& o : kOffsets) {
                if (inside(g, col + o[0], row + o[1])) s += kappa_(col + o[0], row + o[1]);
                if (inside(g, col - o[0], row - o[1])) s += kappa_(col - o[0], row - o[1]);
            }
            majorizer_(col, row) = 2.0 * beta_ * kappa_(col, row) * s;
        }
}

double EdgePreservingPenalty::value(const Image& x) const {
    require(x.grid() == kappa_.grid(), "EP: image grid mismatch");
    const Grid& g = x.grid();
    double total = 0.0;
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col)
            for (const auto& o : kOffsets) {
                const int c2 = col + o[0];
                const int r2 = row + o[1];
                if (!inside(g, c2, r2)) continue;
                total += kappa_(col, row) * kappa_(c2, r2) * ep_potential(x(col, row) - x(c2, r2), delta_);
            }
    return beta_ * total;
}

Image EdgePreservingPenalty::gradient(const Image& x) const {
    require(x.grid() == kappa_.grid(), "EP: image grid mismatch");
    const Grid& g = x.grid();
    Image grad(g);
#pragma omp parallel for schedule(static)
    for (int row = 0; row < g.height; ++row)
        for (int col = 0; col < g.width; ++col) {
            const double xj = x(col, row);
            double s = 0.0;
            for (const auto& o : kOffsets) {
                if (inside(g, col + o[0], row + o[1]))
                    s += kappa_(col + o[0], row + o[1]) * ep_potential_derivative(xj - x(col + o[0], row + o[1]), delta_);
                if (inside(g, col - o[0], row - o[1]))
                    s += kappa_(col - o[0], row - o[1]) * ep_potential_derivative(xj - x(col - o[0], row - o[1]), delta_);
            }
            grad(col, row) = beta_ * kappa_(col, row) * s;
        }
    return grad;
}

void validate_ep_config(const EpConfig& cfg) {
    require(cfg.beta > 0.0, "EP: beta must be positive");
    require(cfg.delta > 0.0, "EP: delta must be positive");
    require(cfg.iters >= 1 && cfg.subsets >= 1, "EP: iteration and subset counts must be >= 1");
}

EpResult reconstruct_ep(const Sinogram& sino, const EpConfig& cfg, const Image& x0) {
    validate_ep_config(cfg);
    x0.validate();
    const DataTerm data(sino, x0.grid(), cfg.subsets);
    const EdgePreservingPenalty penalty(noise_uniformity_weights(sino, x0.grid()), cfg.beta, cfg.delta);
    ImageSolver solver(data, cfg.solver);
    EpResult out{x0, {}};
    for (auto& v : out.image.values()) v = std::max(v, 0.0);
    if (cfg.track_objective) out.objective.reserve(static_cast<std::size_t>(cfg.iters) + 1);
    for (int it = 0; it < cfg.iters; ++it) {
        solver.run(out.image, penalty, 1);
        if (cfg.track_objective) out.objective.push_back(data.value(out.image) + penalty.value(out.image));
    }
    return out;
}

}  // namespace mrst
