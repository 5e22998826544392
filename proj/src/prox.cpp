#include "rsrrr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace rsrrr {

HuberParam HuberParam::finite(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ConfigError("Huber parameter must be positive and finite, got " + std::to_string(tau));
  }
  return HuberParam(tau);
}

HuberParam HuberParam::from_value(double tau) {
  if (tau == std::numeric_limits<double>::infinity()) return infinite();
  return finite(tau);
}

double huber(double z, HuberParam tau) {
  const double t = tau.value();
  const double a = std::abs(z);
  if (a <= t) return 0.5 * z * z;
  return t * a - 0.5 * t * t;
}

double huber_sum(const Matrix& m, HuberParam tau) {
  if (tau.is_infinite()) return 0.5 * m.squaredNorm();
  double total = 0.0;
  const double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) total += huber(data[i], tau);
  return total;
}

double psi(double u, HuberParam tau) {
  if (tau.is_infinite()) {
    throw ConfigError("psi is undefined for the squared-error sentinel");
  }
  const double t = tau.value();
  return std::clamp(u, -t, t);
}

double soft_threshold(double a, double b) {
  const double shrunk = std::abs(a) - b;
  if (shrunk <= 0.0) return 0.0;
  return std::copysign(shrunk, a);
}

Matrix soft_threshold(const Matrix& m, double b) {
  return m.unaryExpr([b](double a) { return soft_threshold(a, b); });
}

Matrix svd_soft_threshold(const Matrix& m, double b) {
  require_finite(m, "svd_soft_threshold input");
  if (b < 0.0) throw ConfigError("svd_soft_threshold: negative threshold");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  if (m.size() == 0) return out;

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    std::ostringstream os;
    os << "SVD failed on " << shape_string(m) << " matrix";
    throw NumericalError(os.str());
  }
  const Vector& w = svd.singularValues();
  Eigen::Index kept = 0;
  while (kept < w.size() && w(kept) > b) ++kept;
  if (kept == 0) return out;

  const Vector shrunk = w.head(kept).array() - b;
  out.noalias() = svd.matrixU().leftCols(kept) * shrunk.asDiagonal() * svd.matrixV().leftCols(kept).transpose();
  return out;
}

double prox_d_entry(double y, double c, HuberParam tau, long n, double rho) {
  const double nr = static_cast<double>(n) * rho;
  const double interior = (y + nr * c) / (1.0 + nr);
  if (tau.is_infinite()) return interior;
  if (std::abs(nr * (y - c) / (1.0 + nr)) <= tau.value()) return interior;
  return y - soft_threshold(y - c, tau.value() / nr);
}

}  // namespace rsrrr
