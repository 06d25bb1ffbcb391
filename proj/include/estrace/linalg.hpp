#pragma once

#include <Eigen/Dense>

namespace estrace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace estrace
