#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rsrrr/admm.hpp"
#include "rsrrr/simulate.hpp"

namespace rsrrr {

//! Gradient of (1/n) huber_sum(Y - XA, tau) with respect to A:
//!   -(1/n) X^T psi(Y - XA).
//! An infinite tau gives the squared-error gradient -(1/n) X^T (Y - XA).
Matrix loss_gradient(const Problem& problem, const Matrix& A, HuberParam tau);

//! (1/n) sum_i T_i (x) X_i X_i^T, T_i = diag(1(|Y_ik - X_i^T A_k| <= tau)),
//! indexed by column-major vec(A). Refuses p*q > 2000.
Matrix loss_hessian(const Problem& problem, const Matrix& A, HuberParam tau);

inline constexpr Eigen::Index kMaxHessianDim = 2000;

//! Bounded (1+delta)th absolute moment of a noise law.
struct NoiseSpec {
  double delta = 1.0;
  double v_delta = 1.0;
  void validate() const;
};

using Sampler = std::function<double(std::mt19937_64&)>;

//! E|T|^{1+delta} for Student t with `df` degrees of freedom; needs 1+delta < df.
NoiseSpec student_t_noise_spec(double df, double delta);
Sampler student_t_sampler(double df);

struct SupnormConfig {
  std::vector<Eigen::Index> n_grid{100, 200, 400, 800, 1600};
  Eigen::Index p = 50, q = 10;
  CoefPattern pattern = CoefPattern::SparseRank1;
  std::optional<NoiseKind> noise = NoiseKind::Normal;  // nullopt: noiseless
  double tau_c = 1.0;
  long replicates = 500;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct SupnormRow {
  Eigen::Index n = 0;
  double tau = 0.0;
  double quantile = 0.0;  // (1 - 1/(pq)) empirical quantile over replicates
  double mean = 0.0;
};

struct SupnormReport {
  std::vector<SupnormRow> rows;
  std::optional<double> slope;  // least-squares slope of log quantile on log n
};

//! Monte-Carlo distribution of ||grad L_tau(A*)||_max as n grows.
SupnormReport gradient_supnorm_experiment(const SupnormConfig& config);

struct TruncationReport {
  double frequency = 0.0;  // share of replicates violating the bound
  double bound = 0.0;      // (2/tau)^{1+delta} v_delta + sqrt(t/n)
  double allowed = 0.0;    // exp(-2t) + 3 sqrt(exp(-2t)/replicates)
  long violations = 0;
  long replicates = 0;
};

//! Frequency of (1/n) sum_i 1(|E_i| > tau/2) > (2/tau)^{1+delta} v_delta + sqrt(t/n)
//! over independent samples of size n.
TruncationReport truncation_bound_experiment(const NoiseSpec& spec, const Sampler& sampler, long n, double tau,
                                             double t, long replicates, std::uint64_t seed, unsigned threads = 1);

struct GrubbsColumn {
  double statistic = 0.0;
  double critical = 0.0;
  bool flagged = false;
  bool skipped = false;
  std::string note;
};

struct GrubbsReport {
  std::vector<GrubbsColumn> columns;
  double alpha = 0.05;
  double correction = 1.0;  // Bonferroni factor (number of columns)
  long flagged_count = 0;
};

//! Two-sided Grubbs critical value for N observations at level `alpha`.
double grubbs_critical(long N, double alpha);

//! Two-sided Grubbs test on each column of Y at level alpha / q.
GrubbsReport grubbs_screen(const Matrix& Y, double alpha);

//! Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double prob);

}  // namespace rsrrr
