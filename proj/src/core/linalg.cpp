#include "mrst/core/linalg.hpp"

#include <cmath>
#include <numbers>

#include "mrst/core/errors.hpp"

namespace mrst {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void hard_threshold_inplace(Matrix& m, double eta) {
    require(eta >= 0.0, "hard_threshold: eta must be nonnegative");
    require(!m.hasNaN(), "hard_threshold: input contains NaN");
    double* v = m.data();
    const Eigen::Index n = m.size();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(v[i]) < eta) v[i] = 0.0;
    }
}

Matrix hard_threshold(const Matrix& m, double eta) {
    Matrix out = m;
    hard_threshold_inplace(out, eta);
    return out;
}

Svd full_svd(const Matrix& g) {
    require(g.rows() == g.cols(), "full_svd: matrix must be square");
    require(g.allFinite(), "full_svd: matrix must be finite");
    // Two-sided Jacobi: accurate to working precision, and p is at most a few hundred here.
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Matrix dct1_matrix(int n) {
    require(n >= 1, "dct matrix size must be >= 1");
    Matrix c(n, n);
    const double s0 = std::sqrt(1.0 / n);
    const double s = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            c(k, i) = (k == 0 ? s0 : s * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n)));
        }
    }
    return c;
}

Matrix dct2_matrix(int patch_w, int patch_h) {
    require(patch_w >= 1 && patch_h >= 1, "dct2_matrix: dimensions must be >= 1");
    const Matrix cx = dct1_matrix(patch_w);
    const Matrix cy = dct1_matrix(patch_h);
    const int p = patch_w * patch_h;
    // Row-major patch vectorization: index = y * patch_w + x, so W = Cy (x) Cx.
    Matrix w(p, p);
    for (int ky = 0; ky < patch_h; ++ky)
        for (int kx = 0; kx < patch_w; ++kx)
            for (int y = 0; y < patch_h; ++y)
                for (int x = 0; x < patch_w; ++x)
                    w(ky * patch_w + kx, y * patch_w + x) = cy(ky, y) * cx(kx, x);
    return w;
}

double orthogonality_error(const Matrix& w) {
    return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).norm();
}

}  // namespace mrst
