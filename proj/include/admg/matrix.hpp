#pragma once

#include <Eigen/Dense>

namespace admg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace admg
