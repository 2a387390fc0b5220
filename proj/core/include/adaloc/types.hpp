#pragma once

#include <Eigen/Dense>

namespace adaloc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace adaloc
