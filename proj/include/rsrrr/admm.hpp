#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "rsrrr/matrix.hpp"
#include "rsrrr/prox.hpp"

namespace rsrrr {

//! Design X (n x p) and response Y (n x q) sharing row count n.
class Problem {
 public:
  Problem(Matrix x, Matrix y);

  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index p() const { return x_.cols(); }
  Eigen::Index q() const { return y_.cols(); }

  //! True when max |X_ij| equals one within `tol`. Solvers accept any design,
  //! but the tuning rules assume this scaling.
  bool is_standardized(double tol = 1e-12) const;

  //! Sub-problem formed by the given rows.
  Problem rows(const std::vector<Eigen::Index>& idx) const;

 private:
  Matrix x_;
  Matrix y_;
};

struct Hyperparams {
  double lambda = 0.0;
  double gamma = 0.0;
  HuberParam tau = HuberParam::infinite();
  double rho = 0.1;
  double eps = 1e-6;
  long max_iter = 10000;

  //! Throws ConfigError on out-of-range values.
  void validate() const;
};

//! Primal blocks and scaled duals of the consensus splitting
//!   D = XA, Z = A, W = A.
struct AdmmState {
  Matrix A, Z, W;     // p x q
  Matrix D;           // n x q
  Matrix B_D;         // n x q
  Matrix B_Z, B_W;    // p x q
  long iter = 0;

  static AdmmState zeros(const Problem& problem);
};

struct Duals {
  Matrix B_D, B_Z, B_W;
};

struct PrimalResiduals {
  double d = 0.0;  // ||D - XA||_F
  double z = 0.0;  // ||Z - A||_F
  double w = 0.0;  // ||W - A||_F
};

struct SupportEntry {
  Eigen::Index row;
  Eigen::Index col;
  friend bool operator==(const SupportEntry&, const SupportEntry&) = default;
  friend auto operator<=>(const SupportEntry&, const SupportEntry&) = default;
};
using Support = std::vector<SupportEntry>;

struct FitResult {
  Matrix A_hat;
  Support support;        // nonzero entries of the Z block, column-major order
  long rank_estimate = 0; // singular values of W above 1e-8 * max
  double objective = 0.0;
  long iterations = 0;
  bool converged = false;
  PrimalResiduals residuals;
};

//! Reusable Cholesky factorization of X^T X + 2I, the normal operator of the
//! stacked design (X; I; I). Immutable once built; safe to share across threads.
class NormalSolver {
 public:
  explicit NormalSolver(const Matrix& x);

  Eigen::Index dim() const { return dim_; }
  //! Solves (X^T X + 2I) V = rhs.
  Matrix solve(const Matrix& rhs) const;

 private:
  Eigen::Index dim_;
  Eigen::LLT<Matrix> llt_;
};

//! (1/n) huber_sum(Y - XA) + lambda (||A||_* + gamma ||A||_{1,1}).
double objective(const Problem& problem, const Matrix& A, const Hyperparams& hp);

Matrix update_A(const AdmmState& state, const Problem& problem, const NormalSolver& solver);
Matrix update_Z(const AdmmState& state, const Hyperparams& hp);
Matrix update_W(const AdmmState& state, const Hyperparams& hp);
Matrix update_D(const AdmmState& state, const Problem& problem, const Hyperparams& hp);
Duals update_duals(const AdmmState& state, const Problem& problem);

//! One full sweep A, Z, W, D, then duals. Increments state.iter.
void admm_step(AdmmState& state, const Problem& problem, const Hyperparams& hp, const NormalSolver& solver);

PrimalResiduals primal_residuals(const AdmmState& state, const Problem& problem);

//! Runs the ADMM iteration from the all-zero start until
//!   ||A^t - A^{t-1}||_F^2 / ||A^{t-1}||_F^2 <= eps
//! (absolute form while ||A^{t-1}||_F < 1e-12) or max_iter is reached.
FitResult fit(const Problem& problem, const Hyperparams& hp);
FitResult fit(const Problem& problem, const Hyperparams& hp, const NormalSolver& solver);

//! Nonzero entries of `z` in column-major order.
Support support_of(const Matrix& z);

//! Singular values of `w` above rel_tol times the largest.
long numerical_rank(const Matrix& w, double rel_tol = 1e-8);

}  // namespace rsrrr
