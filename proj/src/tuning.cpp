#include "rsrrr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rsrrr/parallel.hpp"

namespace rsrrr {

std::vector<double> default_tau_c_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 22; ++i) grid.push_back((40 + 5 * i) / 100.0);
  return grid;
}

HuberParam tau_from_c(double c, Eigen::Index n, Eigen::Index p, Eigen::Index q) {
  if (c == std::numeric_limits<double>::infinity()) return HuberParam::infinite();
  const double log_pq = std::log(static_cast<double>(p) * static_cast<double>(q));
  if (!(log_pq > 0.0)) throw ConfigError("tau rule needs p*q > 1");
  return HuberParam::finite(c * std::sqrt(static_cast<double>(n) / log_pq));
}

void CvPlan::validate() const {
  if (folds < 2) throw ConfigError("CV needs at least 2 folds");
  if (gamma_grid.empty() || tau_c_grid.empty()) throw ConfigError("empty gamma or tau grid");
  if (lambda_grid.empty() && lambda_count < 1) throw ConfigError("empty lambda grid");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) throw ConfigError("lambda_min_ratio must be in (0, 1]");
  for (double l : lambda_grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda grid values must be positive");
  for (double g : gamma_grid)
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("gamma grid values must be >= 0");
  for (double c : tau_c_grid)
    if (!(c > 0.0)) throw ConfigError("tau_c grid values must be positive");
  solver.validate();
}

FoldAssignment make_folds(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("make_folds: k must be at least 2");
  if (n < k) throw ConfigError("make_folds: fewer rows (" + std::to_string(n) + ") than folds");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  FoldAssignment labels(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) labels[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % k);
  return labels;
}

namespace {

struct FoldData {
  Problem train;
  Problem held;
  NormalSolver solver;
};

std::vector<FoldData> split_folds(const Problem& problem, const FoldAssignment& folds) {
  if (static_cast<Eigen::Index>(folds.size()) != problem.n()) {
    throw DimensionError("fold assignment length differs from row count");
  }
  const int k = folds.empty() ? 0 : *std::max_element(folds.begin(), folds.end()) + 1;
  std::vector<FoldData> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train, held;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? held : train).push_back(static_cast<Eigen::Index>(i));
    if (held.empty() || train.empty()) throw ConfigError("fold " + std::to_string(f) + " is empty");
    Problem tr = problem.rows(train);
    NormalSolver solver(tr.x());
    out.push_back(FoldData{std::move(tr), problem.rows(held), std::move(solver)});
  }
  return out;
}

double held_out_loss(const Problem& held, const Matrix& A, HuberParam tau) {
  return huber_sum(held.y() - held.x() * A, tau) / static_cast<double>(held.n());
}

CvScore score_folds(const std::vector<FoldData>& data, const Hyperparams& hp) {
  std::vector<double> losses;
  CvScore s;
  for (const auto& fd : data) {
    const FitResult r = fit(fd.train, hp, fd.solver);
    if (!r.converged) ++s.nonconverged_folds;
    losses.push_back(held_out_loss(fd.held, r.A_hat, hp.tau));
  }
  const double k = static_cast<double>(losses.size());
  s.mean = std::accumulate(losses.begin(), losses.end(), 0.0) / k;
  double ss = 0.0;
  for (double l : losses) ss += (l - s.mean) * (l - s.mean);
  s.se = losses.size() > 1 ? std::sqrt(ss / (k - 1.0)) / std::sqrt(k) : 0.0;
  return s;
}

bool is_zero_fit(const FitResult& r, double gamma) {
  return r.rank_estimate == 0 || (gamma > 0.0 && r.support.empty());
}

}  // namespace

CvScore cv_score(const Problem& problem, const Hyperparams& hp, const FoldAssignment& folds) {
  hp.validate();
  return score_folds(split_folds(problem, folds), hp);
}

double lambda_max(const Problem& problem, double gamma, HuberParam tau, const Hyperparams& solver) {
  return lambda_max(problem, gamma, tau, solver, NormalSolver(problem.x()));
}

double lambda_max(const Problem& problem, double gamma, HuberParam tau, const Hyperparams& solver,
                  const NormalSolver& normal) {
  Matrix score = problem.y();
  if (!tau.is_infinite()) score = score.unaryExpr([tau](double u) { return psi(u, tau); });
  const Matrix grad = problem.x().transpose() * score / static_cast<double>(problem.n());
  double bound = Eigen::JacobiSVD<Matrix>(grad).singularValues()(0);
  if (gamma > 0.0) bound = std::min(bound, grad.cwiseAbs().maxCoeff() / gamma);
  if (!(bound > 0.0)) throw NumericalError("lambda_max: loss gradient at zero vanishes");

  Hyperparams hp = solver;
  hp.gamma = gamma;
  hp.tau = tau;
  auto zero_at = [&](double lambda) {
    hp.lambda = lambda;
    return is_zero_fit(fit(problem, hp, normal), gamma);
  };

  double lambda = bound / 64.0;
  if (zero_at(lambda)) {
    for (int i = 0; i < 30; ++i) {
      if (!zero_at(lambda / 2.0)) break;
      lambda /= 2.0;
    }
    return lambda;
  }
  while (lambda < bound) {
    lambda *= 2.0;
    if (lambda >= bound) return bound;
    if (zero_at(lambda)) return lambda;
  }
  return bound;
}

std::vector<double> log_grid(double top, int count, double min_ratio) {
  if (!(top > 0.0) || count < 1) throw ConfigError("log_grid: need top > 0 and count >= 1");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double log_ratio = std::log(min_ratio);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = top * std::exp(log_ratio * i / (count - 1));
  return grid;
}

CvResult cross_validate(const Problem& problem, const CvPlan& plan) {
  plan.validate();
  const FoldAssignment folds = make_folds(problem.n(), plan.folds, plan.seed);
  const std::vector<FoldData> fold_data = split_folds(problem, folds);
  const NormalSolver full_solver(problem.x());

  struct Pair {
    double tau_c;
    HuberParam tau;
    double gamma;
    std::vector<double> lambdas;
  };
  std::vector<Pair> pairs;
  for (double c : plan.tau_c_grid)
    for (double g : plan.gamma_grid) pairs.push_back(Pair{c, tau_from_c(c, problem.n(), problem.p(), problem.q()), g, {}});

  if (plan.lambda_grid.empty()) {
    parallel_for(pairs.size(), plan.threads, [&](std::size_t i) {
      Pair& pr = pairs[i];
      const double top = lambda_max(problem, pr.gamma, pr.tau, plan.solver, full_solver);
      pr.lambdas = log_grid(top, plan.lambda_count, plan.lambda_min_ratio);
    });
  } else {
    std::vector<double> grid = plan.lambda_grid;
    std::sort(grid.begin(), grid.end(), std::greater<>());
    for (auto& pr : pairs) pr.lambdas = grid;
  }

  std::vector<CvEntry> table;
  std::vector<Hyperparams> params;
  for (const auto& pr : pairs) {
    for (double l : pr.lambdas) {
      CvEntry e;
      e.lambda = l;
      e.gamma = pr.gamma;
      e.tau_c = pr.tau_c;
      e.tau = pr.tau.value();
      table.push_back(e);
      Hyperparams hp = plan.solver;
      hp.lambda = l;
      hp.gamma = pr.gamma;
      hp.tau = pr.tau;
      params.push_back(hp);
    }
  }

  parallel_for(table.size(), plan.threads, [&](std::size_t i) {
    try {
      const CvScore s = score_folds(fold_data, params[i]);
      table[i].mean = s.mean;
      table[i].se = s.se;
      table[i].nonconverged_folds = s.nonconverged_folds;
    } catch (const std::exception& ex) {
      table[i].failed = true;
      table[i].mean = std::numeric_limits<double>::infinity();
      table[i].message = ex.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const CvEntry& e = table[i];
    if (e.failed || !std::isfinite(e.mean)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const CvEntry& b = table[*best];
    if (e.mean < b.mean || (e.mean == b.mean && (e.lambda > b.lambda || (e.lambda == b.lambda && e.tau > b.tau)))) {
      best = i;
    }
  }
  if (!best) {
    throw NumericalError("cross_validate: every grid combination failed (" +
                         (table.empty() ? std::string("empty grid") : table.front().message) + ")");
  }

  CvResult result;
  result.best = params[*best];
  result.best_tau_c = table[*best].tau_c;
  result.cv_table = std::move(table);
  result.refit = fit(problem, result.best, full_solver);
  return result;
}

}  // namespace rsrrr
