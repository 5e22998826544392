#pragma once

#include <limits>

#include "rsrrr/matrix.hpp"

namespace rsrrr {

//! Huber robustification parameter. Either a positive finite threshold or the
//! infinite sentinel, under which every Huber routine reduces exactly to its
//! squared-error counterpart.
class HuberParam {
 public:
  //! Throws ConfigError unless 0 < tau < inf.
  static HuberParam finite(double tau);
  static HuberParam infinite() { return HuberParam(std::numeric_limits<double>::infinity()); }
  //! Accepts +inf as the sentinel, otherwise behaves like finite().
  static HuberParam from_value(double tau);

  bool is_infinite() const { return tau_ == std::numeric_limits<double>::infinity(); }
  //! The threshold; +inf for the squared-error sentinel.
  double value() const { return tau_; }

  friend bool operator==(HuberParam a, HuberParam b) { return a.tau_ == b.tau_; }

 private:
  explicit HuberParam(double tau) : tau_(tau) {}
  double tau_;
};

//! Huber loss: z^2/2 for |z| <= tau, tau|z| - tau^2/2 beyond.
double huber(double z, HuberParam tau);

//! Sum of huber() over all entries of `m`.
double huber_sum(const Matrix& m, HuberParam tau);

//! Clamped identity u -> max(-tau, min(u, tau)), the derivative of huber().
//! Throws ConfigError for infinite tau.
double psi(double u, HuberParam tau);

//! sign(a) * max(|a| - b, 0). Requires b >= 0.
double soft_threshold(double a, double b);

//! Entrywise soft_threshold.
Matrix soft_threshold(const Matrix& m, double b);

//! Singular value soft-thresholding: sum_j max(w_j - b, 0) u_j v_j^T over the
//! thin SVD of `m`. Triples with w_j <= b are dropped.
Matrix svd_soft_threshold(const Matrix& m, double b);

//! Minimizer over d of (1/n) huber(y - d) + (rho/2)(d - c)^2.
double prox_d_entry(double y, double c, HuberParam tau, long n, double rho);

}  // namespace rsrrr
