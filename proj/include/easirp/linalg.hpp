#pragma once

#include <Eigen/Dense>

namespace easirp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Sample matrices are stored one sample per row so that row access is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace easirp
