#include "rsrrr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rsrrr/parallel.hpp"

namespace rsrrr {

std::string to_string(CoefPattern p) {
  switch (p) {
    case CoefPattern::DenseRank1: return "dense-rank1";
    case CoefPattern::DenseRank2: return "dense-rank2";
    case CoefPattern::SparseRank1: return "sparse-rank1";
    case CoefPattern::SparseRank2: return "sparse-rank2";
  }
  return "?";
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::Normal: return "normal";
    case NoiseKind::StudentT: return "t";
    case NoiseKind::LogNormal: return "lognormal";
  }
  return "?";
}

std::string to_string(Method m) { return m == Method::Huber ? "huber" : "squared"; }

CoefPattern parse_pattern(const std::string& s) {
  for (auto p : {CoefPattern::DenseRank1, CoefPattern::DenseRank2, CoefPattern::SparseRank1, CoefPattern::SparseRank2})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown coefficient pattern '" + s + "'");
}

NoiseKind parse_noise(const std::string& s) {
  if (s == "normal") return NoiseKind::Normal;
  if (s == "t" || s == "student_t") return NoiseKind::StudentT;
  if (s == "lognormal" || s == "log-normal") return NoiseKind::LogNormal;
  throw ConfigError("unknown noise kind '" + s + "'");
}

Method parse_method(const std::string& s) {
  if (s == "huber") return Method::Huber;
  if (s == "squared") return Method::Squared;
  throw ConfigError("unknown method '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void ScenarioSpec::validate() const {
  if (n < 1 || p < 1 || q < 1) throw ConfigError("scenario dimensions must be positive");
  if (!(contamination_frac >= 0.0 && contamination_frac < 1.0)) throw ConfigError("contamination fraction must be in [0, 1)");
  if (!(contamination_range.first <= contamination_range.second)) throw ConfigError("contamination range is empty");
  if (pattern == CoefPattern::SparseRank1 && (p < 4 || q < 4)) throw ConfigError("sparse-rank1 needs p, q >= 4");
  if (pattern == CoefPattern::SparseRank2 && (p < 6 || q < 6)) throw ConfigError("sparse-rank2 needs p, q >= 6");
  if (pattern == CoefPattern::DenseRank2 && (p < 2 || q < 2)) throw ConfigError("dense-rank2 needs p, q >= 2");
}

ScenarioSpec scenario_by_name(const std::string& name) {
  ScenarioSpec s;
  const auto dash = name.find("-rank");
  if (name.rfind("table", 0) != 0 || dash == std::string::npos) throw ConfigError("unknown scenario '" + name + "'");
  const std::string table = name.substr(5, dash - 5);
  const std::string rank = name.substr(dash + 5);
  if (rank != "1" && rank != "2") throw ConfigError("unknown scenario '" + name + "'");
  const bool r1 = rank == "1";
  if (table == "1") {
    s.pattern = r1 ? CoefPattern::DenseRank1 : CoefPattern::DenseRank2;
  } else if (table == "2") {
    s.pattern = r1 ? CoefPattern::SparseRank1 : CoefPattern::SparseRank2;
  } else if (table == "3" || table == "4") {
    s.pattern = r1 ? CoefPattern::SparseRank1 : CoefPattern::SparseRank2;
    s.n = 150;
    s.p = 200;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return s;
}

Matrix gen_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw ConfigError("gen_design: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  // Stationary AR(1) with coefficient 0.5 has exactly this Toeplitz covariance.
  const double innov = std::sqrt(0.75);
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    double prev = normal(rng);
    x(i, 0) = prev;
    for (Eigen::Index j = 1; j < p; ++j) {
      prev = 0.5 * prev + innov * normal(rng);
      x(i, j) = prev;
    }
  }
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale > 0.0) x /= scale;
  return x;
}

std::pair<Matrix, Support> gen_coef(CoefPattern pattern, Eigen::Index p, Eigen::Index q, std::uint64_t seed) {
  Matrix a = Matrix::Zero(p, q);
  switch (pattern) {
    case CoefPattern::SparseRank2:
      if (p < 6 || q < 6) throw ConfigError("sparse-rank2 needs p, q >= 6");
      a.block(2, 2, 4, 4).array() += 1.0;
      [[fallthrough]];
    case CoefPattern::SparseRank1:
      if (p < 4 || q < 4) throw ConfigError("sparse-rank1 needs p, q >= 4");
      a.block(0, 0, 4, 4).array() += 1.0;
      break;
    case CoefPattern::DenseRank1:
    case CoefPattern::DenseRank2: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> magnitude(0.5, 1.0);
      std::bernoulli_distribution sign(0.5);
      auto draw = [&](Eigen::Index len) {
        Vector v(len);
        for (Eigen::Index i = 0; i < len; ++i) v(i) = sign(rng) ? magnitude(rng) : -magnitude(rng);
        return v;
      };
      const int rank = pattern == CoefPattern::DenseRank1 ? 1 : 2;
      for (int r = 0; r < rank; ++r) {
        const Vector u = draw(p);
        const Vector v = draw(q);
        a.noalias() += u * v.transpose();
      }
      break;
    }
  }
  return {a, support_of(a)};
}

Matrix gen_noise(NoiseKind kind, Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix e(n, q);
  double* d = e.data();
  switch (kind) {
    case NoiseKind::Normal:
      for (Eigen::Index i = 0; i < e.size(); ++i) d[i] = 2.0 * normal(rng);
      break;
    case NoiseKind::StudentT: {
      constexpr double df = 1.5;
      std::chi_squared_distribution<double> chi2(df);
      for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double z = normal(rng);
        d[i] = z / std::sqrt(chi2(rng) / df);
      }
      break;
    }
    case NoiseKind::LogNormal: {
      constexpr double sigma = 1.2;
      const double mean = std::exp(0.5 * sigma * sigma);
      for (Eigen::Index i = 0; i < e.size(); ++i) d[i] = std::exp(sigma * normal(rng)) - mean;
      break;
    }
  }
  return e;
}

std::pair<Matrix, Support> contaminate(const Matrix& y, double frac, std::pair<double, double> range,
                                       std::uint64_t seed) {
  if (!(frac >= 0.0 && frac < 1.0)) throw ConfigError("contamination fraction must be in [0, 1)");
  const auto total = static_cast<std::size_t>(y.size());
  const auto count = static_cast<std::size_t>(std::floor(frac * static_cast<double>(total) + 0.5));
  Matrix out = y;
  if (count == 0) return {out, {}};

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pos(total);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots are a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(pos[i], pos[pick(rng)]);
  }
  pos.resize(count);
  std::sort(pos.begin(), pos.end());

  std::uniform_real_distribution<double> value(range.first, range.second);
  Support mask;
  mask.reserve(count);
  for (std::size_t k : pos) {
    out.data()[k] = value(rng);
    const auto idx = static_cast<Eigen::Index>(k);
    mask.push_back({idx % y.rows(), idx / y.rows()});
  }
  return {out, mask};
}

GeneratedData generate(const ScenarioSpec& spec) {
  spec.validate();
  Matrix x = gen_design(spec.n, spec.p, derive_seed(spec.seed, 0));
  auto [a_star, support] = gen_coef(spec.pattern, spec.p, spec.q, derive_seed(spec.seed, 1));
  Matrix e = gen_noise(spec.noise, spec.n, spec.q, derive_seed(spec.seed, 2));
  Matrix y = x * a_star + e;
  auto [y_c, mask] = contaminate(y, spec.contamination_frac, spec.contamination_range, derive_seed(spec.seed, 3));
  return GeneratedData{Problem(std::move(x), std::move(y_c)), std::move(a_star), std::move(support), std::move(e),
                       std::move(mask)};
}

Metrics evaluate(const Matrix& A_hat, const Support& support_hat, const GeneratedData& truth) {
  require_shape(A_hat, truth.A_star.rows(), truth.A_star.cols(), "evaluate: estimate");
  Metrics m;
  m.frob_error = (A_hat - truth.A_star).norm();

  Support hat = support_hat;
  std::sort(hat.begin(), hat.end());
  hat.erase(std::unique(hat.begin(), hat.end()), hat.end());
  Support star = truth.support_star;
  std::sort(star.begin(), star.end());

  Support both;
  std::set_intersection(hat.begin(), hat.end(), star.begin(), star.end(), std::back_inserter(both));
  const double total = static_cast<double>(truth.A_star.size());
  const double s = static_cast<double>(star.size());
  if (!star.empty()) m.tpr = static_cast<double>(both.size()) / s;
  if (s < total) m.fpr = static_cast<double>(hat.size() - both.size()) / (total - s);
  return m;
}

namespace {

// Neumaier-compensated mean and sample standard error.
struct Moments {
  long count = 0;
  double sum = 0.0, comp = 0.0;
  std::vector<double> values;

  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    values.push_back(x);
    ++count;
  }
  double mean() const { return (sum + comp) / static_cast<double>(count); }
  std::optional<double> se() const {
    if (count < 2) return std::nullopt;
    const double m = mean();
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(count - 1)) / std::sqrt(static_cast<double>(count));
  }
};

}  // namespace

Summary summarize(const std::vector<ReplicateRow>& rows) {
  Summary s;
  Moments frob, tpr, fpr;
  for (const auto& r : rows) {
    if (r.failed) {
      ++s.failed;
      continue;
    }
    frob.add(r.metrics.frob_error);
    if (r.metrics.tpr) tpr.add(*r.metrics.tpr);
    if (r.metrics.fpr) fpr.add(*r.metrics.fpr);
  }
  s.used = frob.count;
  if (frob.count > 0) {
    s.mean_frob = frob.mean();
    s.se_frob = frob.se();
  } else {
    s.mean_frob = std::numeric_limits<double>::quiet_NaN();
  }
  if (tpr.count > 0) {
    s.mean_tpr = tpr.mean();
    s.se_tpr = tpr.se();
  }
  if (fpr.count > 0) {
    s.mean_fpr = fpr.mean();
    s.se_fpr = fpr.se();
  }
  return s;
}

ReplicateRow run_replicate(const ScenarioSpec& spec, Method method, long replicate, std::uint64_t base_seed,
                           const ScenarioOptions& options) {
  ReplicateRow row;
  row.replicate = replicate;
  row.seed = derive_seed(base_seed, static_cast<std::uint64_t>(replicate));
  try {
    ScenarioSpec s = spec;
    s.seed = row.seed;
    const GeneratedData data = generate(s);

    CvPlan plan = options.cv;
    plan.seed = derive_seed(row.seed, 4);
    plan.threads = 1;
    if (!is_sparse(spec.pattern)) plan.gamma_grid = {0.0};
    if (method == Method::Squared) plan.tau_c_grid = {std::numeric_limits<double>::infinity()};

    const CvResult cv = cross_validate(data.problem, plan);
    row.metrics = evaluate(cv.refit.A_hat, cv.refit.support, data);
    row.lambda = cv.best.lambda;
    row.gamma = cv.best.gamma;
    row.tau = cv.best.tau.value();
    row.tau_c = cv.best_tau_c;
    row.iterations = cv.refit.iterations;
    row.converged = cv.refit.converged;
  } catch (const std::exception& ex) {
    row.failed = true;
    row.message = ex.what();
  }
  return row;
}

ScenarioReport run_scenario(const ScenarioSpec& spec, Method method, long replicates, std::uint64_t base_seed,
                            const ScenarioOptions& options) {
  spec.validate();
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  ScenarioReport report;
  report.spec = spec;
  report.method = method;
  report.rows.resize(static_cast<std::size_t>(replicates));
  parallel_for(report.rows.size(), options.threads, [&](std::size_t r) {
    report.rows[r] = run_replicate(spec, method, static_cast<long>(r), base_seed, options);
  });
  report.summary = summarize(report.rows);
  return report;
}

}  // namespace rsrrr
