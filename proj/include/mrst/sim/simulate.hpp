#pragma once

#include <cstdint>

#include "mrst/core/image.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst {

inline constexpr double kMuWater = 0.02;  // mm^-1

/// mu = HU / 1000 * kMuWater (mm^-1).
Image hu_to_mu(const Image& hu);
Image mu_to_hu(const Image& mu);
inline constexpr double kHuToMu = kMuWater / 1000.0;

enum class WeightMode {
    counts,    // w_i = measured (clamped) counts
    expected,  // w_i = I0 exp(-l_i), the noiseless mean counts
};

struct DoseConfig {
    double i0 = 1e4;  // incident photons per ray
    std::uint64_t seed = 0;
    bool noiseless = false;
    WeightMode weights = WeightMode::counts;
};

/// Monoenergetic transmission scan of a HU image. Counts
/// I_i ~ Poisson(I0 exp(-l_i)) with l = A mu, clamped to >= 1, y_i = log(I0 / I_i).
/// Each ray draws from its own generator keyed by (seed, ray index), so the
/// output is independent of evaluation order and thread count. Noiseless mode
/// returns y = l and w = I0 exp(-l).
Sinogram simulate_sinogram(const Image& truth_hu, const Geometry& geom, const DoseConfig& dose);

/// Post-log sample for one ray (exposed for statistical tests).
double sample_post_log(double line_integral, double i0, std::uint64_t seed, std::uint64_t ray, double* counts = nullptr);

}  // namespace mrst
