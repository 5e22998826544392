#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsrrr/admm.hpp"

namespace rsrrr {

//! Row -> fold label in [0, k).
using FoldAssignment = std::vector<int>;

//! Default robustification multipliers c in tau = c * sqrt(n / log(pq)):
//! 0.40, 0.45, ..., 1.50.
std::vector<double> default_tau_c_grid();

//! tau = c * sqrt(n / log(pq)); c = +inf maps to the squared-error sentinel.
HuberParam tau_from_c(double c, Eigen::Index n, Eigen::Index p, Eigen::Index q);

struct CvPlan {
  int folds = 5;
  //! Explicit lambda values. When empty, a log-spaced grid of `lambda_count`
  //! values from lambda_max down to lambda_max * lambda_min_ratio is built
  //! separately for every (tau, gamma) pair.
  std::vector<double> lambda_grid;
  int lambda_count = 50;
  double lambda_min_ratio = 1e-4;
  std::vector<double> gamma_grid{2.5, 3.0, 3.5, 4.0};
  std::vector<double> tau_c_grid = default_tau_c_grid();
  std::uint64_t seed = 1;
  //! Supplies rho, eps and max_iter for every inner fit.
  Hyperparams solver;
  unsigned threads = 1;

  void validate() const;
};

struct CvScore {
  double mean = 0.0;
  double se = 0.0;
  int nonconverged_folds = 0;
};

struct CvEntry {
  double lambda = 0.0;
  double gamma = 0.0;
  double tau_c = 0.0;
  double tau = 0.0;  // +inf for squared error
  double mean = 0.0;
  double se = 0.0;
  int nonconverged_folds = 0;
  bool failed = false;
  std::string message;
};

struct CvResult {
  Hyperparams best;
  double best_tau_c = 0.0;
  std::vector<CvEntry> cv_table;
  FitResult refit;
};

//! Balanced random partition of n rows into k folds, sizes differing by at
//! most one. Deterministic in (n, k, seed).
FoldAssignment make_folds(Eigen::Index n, int k, std::uint64_t seed);

//! Held-out loss (1/n_held) huber_sum(Y_held - X_held A_hat, tau) averaged
//! over folds, with standard error sd / sqrt(k).
CvScore cv_score(const Problem& problem, const Hyperparams& hp, const FoldAssignment& folds);

//! Smallest lambda (up to a factor of two) whose fit is exactly zero in the
//! W block, or the Z block when gamma > 0. Found by doubling/halving from a
//! start below the analytic bound min(||G||_2, ||G||_max / gamma), G the loss
//! gradient at zero.
double lambda_max(const Problem& problem, double gamma, HuberParam tau, const Hyperparams& solver);
double lambda_max(const Problem& problem, double gamma, HuberParam tau, const Hyperparams& solver,
                  const NormalSolver& normal);

//! Descending log-spaced grid of `count` values from `top` to top * min_ratio.
std::vector<double> log_grid(double top, int count, double min_ratio);

//! Joint grid search over (tau, gamma, lambda); tau outer, lambda inner
//! descending. Selects the smallest mean held-out loss, ties going to larger
//! lambda then larger tau, and refits on all rows.
CvResult cross_validate(const Problem& problem, const CvPlan& plan);

}  // namespace rsrrr
