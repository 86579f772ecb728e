#pragma once

#include <vector>

#include "mrst/core/image.hpp"
#include "mrst/core/patches.hpp"
#include "mrst/model/two_layer.hpp"
#include "mrst/recon/data_term.hpp"
#include "mrst/recon/solver.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst {

/// Settings for PWLS with a pre-learned transform regularizer. The layer count
/// comes from the model: one layer gives PWLS-ST, two give PWLS-MRST2.
///
/// A two-layer model with W2 = I and gamma2 = +inf (Z2 stays 0) reproduces a
/// one-layer run with beta' = 2 beta and gamma1' = gamma1 / sqrt(2) exactly.
struct ReconConfig {
    double beta = 1e-5;
    double gamma1 = 30.0;
    double gamma2 = 12.0;
    int outer_iters = 100;
    int inner_iters = 2;
    int subsets = 4;
    SolverKind solver = SolverKind::oslalm;
    PatchConfig patch;
    bool track_objective = true;
};

void validate_recon_config(const ReconConfig& cfg, const TwoLayerModel& model);

/// beta * sum_j {||W1 P^j x - z1^j||^2 + ||W2 (W1 P^j x - z1^j) - z2^j||^2} with fixed codes.
///
/// With unitary transforms the gradient is 2 beta (k c * x - u), where c is the
/// patch coverage, k the layer count and u = sum_j P^jT W1^T (k z1^j + W2^T z2^j)
/// is fixed by the codes, so it is formed once at construction.
class TransformPenalty final : public SmoothPenalty {
public:
    TransformPenalty(const TwoLayerModel& model, const SparseCodes& codes, double beta, const PatchConfig& cfg,
                     const Grid& grid);
    Image gradient(const Image& x) const override;
    const Image& majorizer() const override { return majorizer_; }

private:
    double scale_;
    double layers_;
    Image coverage_;
    Image offset_;
    Image majorizer_;
};

/// Sparse coding of all patches of x: Z1 then Z2 for two layers, H_gamma1(W1 X)
/// for one layer. `codes.z2` is read as the previous second-layer code.
void sparse_code_image(const Image& x, const TwoLayerModel& model, const ReconConfig& cfg, SparseCodes& codes);

/// Full objective 1/2 ||y - c A x||_W^2 + beta * (regularizer with l0 counts).
double pwls_objective(const DataTerm& data, const Image& x, const SparseCodes& codes, const TwoLayerModel& model,
                      const ReconConfig& cfg);

/// inner_iters passes of the configured solver on the image update with codes fixed.
Image image_update(const Image& x, const SparseCodes& codes, const TwoLayerModel& model, const Sinogram& sino,
                   const ReconConfig& cfg);

struct TransformReconResult {
    Image image;
    SparseCodes codes;
    std::vector<double> objective;  // after each outer iteration, when tracked
};

/// Alternates sparse coding (Z1, then Z2) with the image update, starting from x0.
TransformReconResult reconstruct_transform(const Sinogram& sino, const TwoLayerModel& model, const ReconConfig& cfg,
                                           const Image& x0);

}  // namespace mrst
