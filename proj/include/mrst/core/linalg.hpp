#pragma once

#include "mrst/core/matrix.hpp"

namespace mrst {

/// H_eta: zeroes entries with |m| < eta. Entries with |m| == eta are kept.
/// eta may be +inf (everything is zeroed).
Matrix hard_threshold(const Matrix& m, double eta);

/// In-place variant used by the sparse-coding hot paths.
void hard_threshold_inplace(Matrix& m, double eta);

struct Svd {
    Matrix U;
    Vector S;  // nonincreasing, nonnegative
    Matrix V;
};

/// Full SVD of a square matrix, G = U diag(S) V^T.
Svd full_svd(const Matrix& g);

/// Separable orthonormal 2D DCT-II analysis matrix for a patch_w x patch_h patch
/// vectorized row-major. Row k = ky * patch_w + kx is the (kx, ky) basis function.
Matrix dct2_matrix(int patch_w, int patch_h);

/// 1D orthonormal DCT-II matrix, n x n.
Matrix dct1_matrix(int n);

/// ||W^T W - I||_F
double orthogonality_error(const Matrix& w);

bool all_finite(const Matrix& m);

}  // namespace mrst
