#include "mrst/sim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mrst/core/errors.hpp"
#include "mrst/tomo/projector.hpp"

namespace mrst {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Image hu_to_mu(const Image& hu) {
    Image mu = hu;
    for (auto& v : mu.values()) v *= kHuToMu;
    return mu;
}

Image mu_to_hu(const Image& mu) {
    Image hu = mu;
    for (auto& v : hu.values()) v /= kHuToMu;
    return hu;
}

double sample_post_log(double line_integral, double i0, std::uint64_t seed, std::uint64_t ray, double* counts) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(ray)));
    std::poisson_distribution<long long> poisson(i0 * std::exp(-line_integral));
    const double n = std::max<double>(static_cast<double>(poisson(rng)), 1.0);
    if (counts != nullptr) *counts = n;
    return std::log(i0 / n);
}

Sinogram simulate_sinogram(const Image& truth_hu, const Geometry& geom, const DoseConfig& dose) {
    require(dose.i0 > 0.0 && std::isfinite(dose.i0), "incident intensity I0 must be positive");
    validate_geometry(geom);
    truth_hu.validate();
    Sinogram s{geom, forward_project(hu_to_mu(truth_hu), geom), Projections(geom.n_views, geom.n_det)};
    const auto n = static_cast<std::ptrdiff_t>(geom.rays());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double l = s.y[k];
        const double expected = dose.i0 * std::exp(-l);
        if (dose.noiseless) {
            s.weights[k] = expected;
            continue;
        }
        double counts = 0.0;
        s.y[k] = sample_post_log(l, dose.i0, dose.seed, static_cast<std::uint64_t>(i), &counts);
        s.weights[k] = dose.weights == WeightMode::counts ? counts : expected;
    }
    return s;
}

}  // namespace mrst
