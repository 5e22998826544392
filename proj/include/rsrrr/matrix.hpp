#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace rsrrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

//! Shapes of two or more operands do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical routine failed (non-finite values, SVD failure, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Invalid parameter values or configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string shape_string(const Matrix& m);

//! Throws NumericalError naming `what` if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what);

//! Entrywise l1 norm, sum of |m_ij|.
double l11_norm(const Matrix& m);

//! Sum of singular values.
double nuclear_norm(const Matrix& m);

}  // namespace rsrrr
