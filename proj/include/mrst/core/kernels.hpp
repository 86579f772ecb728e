#pragma once

#include <cstddef>

#include "mrst/core/matrix.hpp"

// Dense kernels over wide p x N patch matrices. The default versions run under
// OpenMP over fixed column blocks; mrst::kernels::serial holds the plain
// reference versions that the tests and the benchmark compare against.
namespace mrst::kernels {

/// W * X
Matrix apply(const Matrix& w, const Matrix& x);
/// W^T * X
Matrix apply_transpose(const Matrix& w, const Matrix& x);
/// A * B^T, reduced over the (long) column dimension.
Matrix cross(const Matrix& a, const Matrix& b);
/// ||M||_F^2
double squared_norm(const Matrix& m);
/// number of entries != 0
std::size_t count_nonzero(const Matrix& m);

namespace serial {
Matrix apply(const Matrix& w, const Matrix& x);
Matrix apply_transpose(const Matrix& w, const Matrix& x);
Matrix cross(const Matrix& a, const Matrix& b);
double squared_norm(const Matrix& m);
std::size_t count_nonzero(const Matrix& m);
}  // namespace serial

}  // namespace mrst::kernels
