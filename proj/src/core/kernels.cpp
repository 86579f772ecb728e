#include "mrst/core/kernels.hpp"

#include <vector>

#include "mrst/core/errors.hpp"
#include "mrst/core/parallel.hpp"

namespace mrst::kernels {

using parallel::block_count;
using parallel::block_range;

Matrix apply(const Matrix& w, const Matrix& x) {
    require(w.cols() == x.rows(), "kernels::apply: shape mismatch");
    Matrix out(w.rows(), x.cols());
    const auto nb = block_count(x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const auto r = block_range(b, x.cols());
        out.middleCols(r.begin, r.end - r.begin).noalias() = w * x.middleCols(r.begin, r.end - r.begin);
    }
    return out;
}

Matrix apply_transpose(const Matrix& w, const Matrix& x) {
    require(w.rows() == x.rows(), "kernels::apply_transpose: shape mismatch");
    Matrix out(w.cols(), x.cols());
    const auto nb = block_count(x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const auto r = block_range(b, x.cols());
        out.middleCols(r.begin, r.end - r.begin).noalias() =
            w.transpose() * x.middleCols(r.begin, r.end - r.begin);
    }
    return out;
}

Matrix cross(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "kernels::cross: shape mismatch");
    const auto nb = block_count(a.cols());
    std::vector<Matrix> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < nb; ++k) {
        const auto r = block_range(k, a.cols());
        const auto n = r.end - r.begin;
        partial[static_cast<std::size_t>(k)].noalias() =
            a.middleCols(r.begin, n) * b.middleCols(r.begin, n).transpose();
    }
    Matrix out = Matrix::Zero(a.rows(), b.rows());
    for (const auto& m : partial) out += m;
    return out;
}

double squared_norm(const Matrix& m) {
    const auto nb = block_count(m.cols());
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < nb; ++k) {
        const auto r = block_range(k, m.cols());
        partial[static_cast<std::size_t>(k)] = m.middleCols(r.begin, r.end - r.begin).squaredNorm();
    }
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

std::size_t count_nonzero(const Matrix& m) {
    const double* v = m.data();
    const Eigen::Index n = m.size();
    std::size_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) count += (v[i] != 0.0) ? 1u : 0u;
    return count;
}

namespace serial {

Matrix apply(const Matrix& w, const Matrix& x) {
    require(w.cols() == x.rows(), "kernels::apply: shape mismatch");
    return w * x;
}

Matrix apply_transpose(const Matrix& w, const Matrix& x) {
    require(w.rows() == x.rows(), "kernels::apply_transpose: shape mismatch");
    return w.transpose() * x;
}

Matrix cross(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "kernels::cross: shape mismatch");
    return a * b.transpose();
}

double squared_norm(const Matrix& m) { return m.squaredNorm(); }

std::size_t count_nonzero(const Matrix& m) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) count += (m.data()[i] != 0.0) ? 1u : 0u;
    return count;
}

}  // namespace serial
}  // namespace mrst::kernels
