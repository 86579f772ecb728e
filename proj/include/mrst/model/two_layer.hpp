#pragma once

#include <filesystem>
#include <iosfwd>

#include "mrst/core/image.hpp"
#include "mrst/core/matrix.hpp"
#include "mrst/core/patches.hpp"

namespace mrst {

/// Pre-learned residual transform model. W1 sparsifies patches, W2 sparsifies
/// the first-layer residual W1*R1 - Z1. Both are unitary. With layers == 1 the
/// second layer is disabled (W2 = I, eta2 ignored) and the model is a plain
/// single-layer sparsifying transform.
struct TwoLayerModel {
    Matrix w1;
    Matrix w2;
    double eta1 = 0.0;
    double eta2 = 0.0;
    int layers = 2;

    int dim() const { return static_cast<int>(w1.rows()); }
};

inline constexpr double kUnitaryTolerance = 1e-8;

/// Throws ArgumentError on bad shapes, layer count, thresholds, or a transform
/// farther than kUnitaryTolerance from unitary.
void validate_model(const TwoLayerModel& m);

/// DCT for W1 and identity for W2.
TwoLayerModel initial_model(int patch_w, int patch_h, int layers, double eta1, double eta2);

struct SparseCodes {
    Matrix z1;
    Matrix z2;  // empty when the model has one layer
};

/// R2 = W1 * R1 - Z1
Matrix layer_residual(const Matrix& r1, const Matrix& z1, const TwoLayerModel& m);

/// Z1 = H_{theta/sqrt2}(W1 R1 - 0.5 W2^T Z2). Exact minimizer over Z1 of
///   ||W1 R1 - Z1||^2 + ||W2 (W1 R1 - Z1) - Z2||^2 + theta^2 ||Z1||_0.
Matrix sparse_code_layer1(const Matrix& r1, const Matrix& z2, const TwoLayerModel& m, double theta);

/// Z2 = H_theta(W2 (W1 R1 - Z1)).
Matrix sparse_code_layer2(const Matrix& r1, const Matrix& z1, const TwoLayerModel& m, double theta);

/// Z1 = H_theta(W1 R1), the single-layer transform sparse code.
Matrix sparse_code_single(const Matrix& r1, const TwoLayerModel& m, double theta);

/// Orthogonal Procrustes step for W1: V U^T from the SVD of R1 Z1^T + 0.5 R1 Z2^T W2.
/// For a one-layer model z2 may be empty. Returns the current W1 if the cross
/// matrix is exactly zero.
Matrix update_transform1(const Matrix& r1, const Matrix& z1, const Matrix& z2, const TwoLayerModel& m);

/// V U^T from the SVD of (W1 R1 - Z1) Z2^T; current W2 if that is exactly zero.
Matrix update_transform2(const Matrix& r1, const Matrix& z1, const Matrix& z2, const TwoLayerModel& m);

struct ObjectiveTerms {
    double fit1 = 0.0;  // ||W1 R1 - Z1||_F^2
    double fit2 = 0.0;  // ||W2 R2 - Z2||_F^2
    std::size_t nnz1 = 0;
    std::size_t nnz2 = 0;
    double penalty1 = 0.0;  // t1^2 * nnz1
    double penalty2 = 0.0;

    double total() const { return fit1 + penalty1 + fit2 + penalty2; }
};

/// Training objective sum_l ||W_l R_l - Z_l||^2 + eta_l^2 ||Z_l||_0 with
/// R2 = W1 R1 - Z1. Only the first layer's terms for one-layer models.
double objective_p0(const Matrix& r1, const SparseCodes& codes, const TwoLayerModel& m, double eta1, double eta2);

/// Same sum evaluated on image patches X with reconstruction thresholds.
double objective_regularizer(const Matrix& x, const SparseCodes& codes, const TwoLayerModel& m, double gamma1,
                             double gamma2);

ObjectiveTerms objective_terms(const Matrix& r1, const SparseCodes& codes, const TwoLayerModel& m, double t1,
                               double t2);

/// Gradient in x of beta * sum_j { ||W1 P^j x - z1^j||^2 + ||W2 (W1 P^j x - z1^j) - z2^j||^2 }
/// with the codes held fixed (first term only for a one-layer model).
Image regularizer_gradient(const Image& x, const SparseCodes& codes, const TwoLayerModel& m, double beta,
                           const PatchConfig& cfg);

/// Diagonal Hessian of the quadratic above: 4 beta coverage (2 beta coverage with one layer).
Image regularizer_majorizer(const TwoLayerModel& m, double beta, const PatchConfig& cfg, const Grid& grid);

/// "MRSTMDL1": magic, u32 p, u8 layers, f64 eta1, f64 eta2, W1 then W2 as
/// p*p f64 row-major. Unitarity is checked again on load.
void write_model(std::ostream& os, const TwoLayerModel& m);
TwoLayerModel read_model(std::istream& is);
void save_model(const std::filesystem::path& path, const TwoLayerModel& m);
TwoLayerModel load_model(const std::filesystem::path& path);

}  // namespace mrst
