#include "rsrrr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rsrrr/parallel.hpp"
#include "rsrrr/tuning.hpp"

namespace rsrrr {

Matrix loss_gradient(const Problem& problem, const Matrix& A, HuberParam tau) {
  require_shape(A, problem.p(), problem.q(), "loss_gradient: coefficient matrix");
  Matrix resid = problem.y() - problem.x() * A;
  if (!tau.is_infinite()) resid = resid.unaryExpr([tau](double u) { return psi(u, tau); });
  return -(problem.x().transpose() * resid) / static_cast<double>(problem.n());
}

Matrix loss_hessian(const Problem& problem, const Matrix& A, HuberParam tau) {
  const auto n = problem.n(), p = problem.p(), q = problem.q();
  require_shape(A, p, q, "loss_hessian: coefficient matrix");
  if (p * q > kMaxHessianDim) {
    throw ConfigError("loss_hessian: p*q = " + std::to_string(p * q) + " exceeds " + std::to_string(kMaxHessianDim));
  }
  const Matrix resid = problem.y() - problem.x() * A;
  Matrix h = Matrix::Zero(p * q, p * q);
  // Off-diagonal blocks vanish because each T_i is diagonal.
  for (Eigen::Index k = 0; k < q; ++k) {
    Matrix block = Matrix::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(resid(i, k)) <= tau.value()) {
        block.selfadjointView<Eigen::Lower>().rankUpdate(problem.x().row(i).transpose());
      }
    }
    block.triangularView<Eigen::StrictlyUpper>() = block.transpose();
    h.block(k * p, k * p, p, p) = block / static_cast<double>(n);
  }
  return h;
}

void NoiseSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("NoiseSpec: delta must be positive");
  if (!(v_delta > 0.0) || !std::isfinite(v_delta)) throw ConfigError("NoiseSpec: v_delta must be positive and finite");
}

NoiseSpec student_t_noise_spec(double df, double delta) {
  const double k = 1.0 + delta;
  if (!(delta > 0.0) || !(k < df)) throw ConfigError("student_t_noise_spec: moment order must be below df");
  const double v = std::pow(df, k / 2.0) * std::tgamma((k + 1.0) / 2.0) * std::tgamma((df - k) / 2.0) /
                   (std::sqrt(M_PI) * std::tgamma(df / 2.0));
  return NoiseSpec{delta, v};
}

Sampler student_t_sampler(double df) {
  return [df](std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(df);
    const double z = normal(rng);
    return z / std::sqrt(chi2(rng) / df);
  };
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ConfigError("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

SupnormReport gradient_supnorm_experiment(const SupnormConfig& config) {
  if (config.n_grid.empty() || config.replicates < 1) throw ConfigError("supnorm: empty grid or no replicates");
  const double prob = 1.0 - 1.0 / static_cast<double>(config.p * config.q);
  SupnormReport report;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    const Eigen::Index n = config.n_grid[g];
    const HuberParam tau = tau_from_c(config.tau_c, n, config.p, config.q);
    std::vector<double> sup(static_cast<std::size_t>(config.replicates));
    parallel_for(sup.size(), config.threads, [&](std::size_t r) {
      const std::uint64_t seed = derive_seed(derive_seed(config.seed, g), r);
      const Matrix x = gen_design(n, config.p, derive_seed(seed, 0));
      const Matrix a_star = gen_coef(config.pattern, config.p, config.q, derive_seed(seed, 1)).first;
      Matrix y = x * a_star;
      if (config.noise) y += gen_noise(*config.noise, n, config.q, derive_seed(seed, 2));
      sup[r] = loss_gradient(Problem(x, y), a_star, tau).cwiseAbs().maxCoeff();
    });
    SupnormRow row;
    row.n = n;
    row.tau = tau.value();
    row.quantile = empirical_quantile(sup, prob);
    row.mean = std::accumulate(sup.begin(), sup.end(), 0.0) / static_cast<double>(sup.size());
    report.rows.push_back(row);
  }

  std::vector<double> lx, ly;
  for (const auto& r : report.rows) {
    if (r.quantile > 0.0) {
      lx.push_back(std::log(static_cast<double>(r.n)));
      ly.push_back(std::log(r.quantile));
    }
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx > 0.0) report.slope = sxy / sxx;
  }
  return report;
}

TruncationReport truncation_bound_experiment(const NoiseSpec& spec, const Sampler& sampler, long n, double tau,
                                             double t, long replicates, std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (n < 1 || replicates < 1) throw ConfigError("truncation: n and replicates must be positive");
  if (!(tau > 0.0) || !(t >= 0.0)) throw ConfigError("truncation: need tau > 0 and t >= 0");
  TruncationReport rep;
  rep.replicates = replicates;
  rep.bound = (std::isinf(tau) ? 0.0 : std::pow(2.0 / tau, 1.0 + spec.delta) * spec.v_delta) +
              std::sqrt(t / static_cast<double>(n));
  const double tail = std::exp(-2.0 * t);
  rep.allowed = tail + 3.0 * std::sqrt(tail / static_cast<double>(replicates));

  std::vector<char> violated(static_cast<std::size_t>(replicates), 0);
  parallel_for(violated.size(), threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    long exceed = 0;
    for (long i = 0; i < n; ++i)
      if (std::abs(sampler(rng)) > tau / 2.0) ++exceed;
    violated[r] = static_cast<double>(exceed) / static_cast<double>(n) > rep.bound;
  });
  rep.violations = std::count(violated.begin(), violated.end(), 1);
  rep.frequency = static_cast<double>(rep.violations) / static_cast<double>(replicates);
  return rep;
}

double grubbs_critical(long N, double alpha) {
  if (N < 3) throw ConfigError("Grubbs' test needs at least 3 observations");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("Grubbs alpha must be in (0, 1)");
  const double dn = static_cast<double>(N);
  boost::math::students_t dist(dn - 2.0);
  const double t = boost::math::quantile(boost::math::complement(dist, alpha / (2.0 * dn)));
  return ((dn - 1.0) / std::sqrt(dn)) * std::sqrt(t * t / (dn - 2.0 + t * t));
}

GrubbsReport grubbs_screen(const Matrix& Y, double alpha) {
  require_finite(Y, "Grubbs input");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("Grubbs alpha must be in (0, 1)");
  if (Y.rows() < 3) throw ConfigError("Grubbs' test needs at least 3 rows per column");
  GrubbsReport rep;
  rep.alpha = alpha;
  rep.correction = static_cast<double>(Y.cols());
  const double critical = grubbs_critical(static_cast<long>(Y.rows()), alpha / rep.correction);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    GrubbsColumn col;
    col.critical = critical;
    const auto c = Y.col(j);
    const double mean = c.mean();
    const double sd = std::sqrt((c.array() - mean).square().sum() / static_cast<double>(Y.rows() - 1));
    if (!(sd > 0.0)) {
      col.skipped = true;
      col.note = "zero variance";
    } else {
      col.statistic = (c.array() - mean).abs().maxCoeff() / sd;
      col.flagged = col.statistic > critical;
    }
    if (col.flagged) ++rep.flagged_count;
    rep.columns.push_back(col);
  }
  return rep;
}

}  // namespace rsrrr
