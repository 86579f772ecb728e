#pragma once

#include <Eigen/Dense>

namespace mrst {

// Column-major, so each column of a patch matrix is one contiguous patch.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace mrst
