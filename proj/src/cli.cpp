#include "rsrrr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "rsrrr/admm.hpp"
#include "rsrrr/diagnostics.hpp"
#include "rsrrr/io.hpp"
#include "rsrrr/simulate.hpp"
#include "rsrrr/tuning.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsrrr::cli {

std::vector<double> parse_grid(const std::string& text, bool allow_inf) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw ConfigError("empty entry in grid '" + text + "'");
    item = item.substr(b, e - b + 1);
    if (allow_inf && (item == "inf" || item == "Inf")) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw ConfigError("cannot parse grid entry '" + item + "' in '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  return out;
}

namespace {

//! Thrown when a numeric self-check exceeds its tolerance.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_tau(const std::string& s) {
  if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
  return parse_grid(s, false).at(0);
}

json tau_json(double tau) { return std::isinf(tau) ? json("inf") : json(tau); }

struct SolverOpts {
  double rho = Hyperparams{}.rho;
  double eps = Hyperparams{}.eps;
  long max_iter = Hyperparams{}.max_iter;

  void add(CLI::App* app) {
    app->add_option("--rho", rho, "ADMM penalty parameter")->capture_default_str();
    app->add_option("--eps", eps, "Relative-change stopping tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
  }
  Hyperparams base() const {
    Hyperparams hp;
    hp.rho = rho;
    hp.eps = eps;
    hp.max_iter = max_iter;
    return hp;
  }
  json to_json() const { return {{"rho", rho}, {"eps", eps}, {"max_iter", max_iter}}; }
};

struct GridOpts {
  int folds = 5;
  std::string lambda_grid;
  int lambda_count = 50;
  double lambda_ratio = 1e-4;
  std::string gamma_grid = "2.5,3,3.5,4";
  std::string tau_c_grid;

  void add(CLI::App* app) {
    app->add_option("--folds", folds, "Number of CV folds")->capture_default_str();
    app->add_option("--lambda-grid", lambda_grid, "Explicit lambda values, comma separated");
    app->add_option("--lambda-count", lambda_count, "Size of the automatic lambda grid")->capture_default_str();
    app->add_option("--lambda-ratio", lambda_ratio, "Smallest/largest lambda of the automatic grid")
        ->capture_default_str();
    app->add_option("--gamma-grid", gamma_grid, "gamma values, comma separated")->capture_default_str();
    app->add_option("--tau-c-grid", tau_c_grid, "tau multipliers c (tau = c sqrt(n/log(pq))); 'inf' = squared loss");
  }
  CvPlan plan(const SolverOpts& solver) const {
    CvPlan p;
    p.folds = folds;
    if (!lambda_grid.empty()) p.lambda_grid = parse_grid(lambda_grid, false);
    p.lambda_count = lambda_count;
    p.lambda_min_ratio = lambda_ratio;
    p.gamma_grid = parse_grid(gamma_grid, false);
    if (!tau_c_grid.empty()) p.tau_c_grid = parse_grid(tau_c_grid, true);
    p.solver = solver.base();
    return p;
  }
  json to_json() const {
    return {{"folds", folds},           {"lambda_grid", lambda_grid}, {"lambda_count", lambda_count},
            {"lambda_ratio", lambda_ratio}, {"gamma_grid", gamma_grid},   {"tau_c_grid", tau_c_grid}};
  }
};

json manifest(const std::string& command, const std::vector<std::string>& argv, const json& config) {
  return {{"tool", "rsrrr"}, {"version", kVersion}, {"command", command}, {"argv", argv}, {"config", config}};
}

// argv minus the --out-dir pair, so a replayed run writes an identical manifest.
std::vector<std::string> replayable_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out-dir") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out-dir=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

Problem load_problem(const std::string& x_path, const std::string& y_path, std::ostream& err) {
  Matrix x = io::read_csv(x_path);
  Matrix y = io::read_csv(y_path);
  if (x.rows() != y.rows()) {
    throw DimensionError("row count mismatch: " + x_path + " has " + std::to_string(x.rows()) + " rows, " + y_path +
                         " has " + std::to_string(y.rows()));
  }
  Problem problem(std::move(x), std::move(y));
  if (!problem.is_standardized(1e-9)) {
    err << "warning: max |X_ij| = " << problem.x().cwiseAbs().maxCoeff()
        << "; the tau rule assumes the design is scaled to max |X_ij| = 1\n";
  }
  return problem;
}

void write_fit_outputs(const fs::path& dir, const FitResult& r, const Hyperparams& hp) {
  io::write_csv(dir / "coefficients.csv", r.A_hat);
  io::write_support_csv(dir / "support.csv", r.support);
  json summary = io::to_json(r);
  summary["hyperparams"] = io::to_json(hp);
  io::write_json(dir / "summary.json", summary);
}

// Random smooth instance for the derivative self-checks: residuals are kept
// away from +-tau by construction of tau.
struct CheckInstance {
  Problem problem;
  Matrix A;
  HuberParam tau;
};

CheckInstance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, Eigen::Index q) {
  std::normal_distribution<double> normal;
  Matrix x(n, p), a(p, q), e(n, q);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  x /= x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = 2.0 * normal(rng);
  Problem problem(x, x * a + e);
  // Median absolute residual, nudged off any residual.
  std::vector<double> r(e.data(), e.data() + e.size());
  for (double& v : r) v = std::abs(v);
  std::sort(r.begin(), r.end());
  double tau = r[r.size() / 2];
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (r[i] <= tau && r[i + 1] > tau) tau = 0.5 * (r[i] + r[i + 1]);
  }
  return {std::move(problem), a, HuberParam::finite(tau)};
}

double kink_distance(const Problem& problem, const Matrix& A, HuberParam tau) {
  const Matrix r = problem.y() - problem.x() * A;
  return (r.array().abs() - tau.value()).abs().minCoeff();
}

double loss_value(const Problem& problem, const Matrix& A, HuberParam tau) {
  return huber_sum(problem.y() - problem.x() * A, tau) / static_cast<double>(problem.n());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust sparse reduced-rank regression with the Huber loss", "rsrrr"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_dir = ".";
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out-dir", out_dir, "Output directory")->capture_default_str(); };

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Solve one penalized problem");
  std::string x_path, y_path;
  double lambda = 0.0, gamma = 0.0;
  std::string tau_text = "inf";
  std::optional<double> tau_c;
  SolverOpts solver;
  fit_cmd->add_option("--x", x_path, "Design matrix CSV")->required();
  fit_cmd->add_option("--y", y_path, "Response matrix CSV")->required();
  fit_cmd->add_option("--lambda", lambda, "Overall penalty level")->capture_default_str();
  fit_cmd->add_option("--gamma", gamma, "Weight of the entrywise l1 penalty")->capture_default_str();
  fit_cmd->add_option("--tau", tau_text, "Huber threshold, or 'inf' for squared loss")->capture_default_str();
  fit_cmd->add_option("--tau-c", tau_c, "Set tau = c sqrt(n/log(pq)) instead of --tau");
  solver.add(fit_cmd);
  add_out(fit_cmd);

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate (lambda, gamma, tau) and refit");
  GridOpts grid;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  cv_cmd->add_option("--x", x_path, "Design matrix CSV")->required();
  cv_cmd->add_option("--y", y_path, "Response matrix CSV")->required();
  grid.add(cv_cmd);
  solver.add(cv_cmd);
  cv_cmd->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  cv_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_out(cv_cmd);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo replicates of a named scenario");
  std::string scenario, noise = "normal", method = "huber";
  double contamination = 0.0;
  long replicates = 100;
  std::optional<long> n_override, p_override, q_override;
  sim_cmd->add_option("--scenario", scenario, "table{1,2,3,4}-rank{1,2}")->required();
  sim_cmd->add_option("--noise", noise, "normal | t | lognormal")->capture_default_str();
  sim_cmd->add_option("--contamination", contamination, "Fraction of Y entries overwritten")->capture_default_str();
  sim_cmd->add_option("--method", method, "huber | squared | both")->capture_default_str();
  sim_cmd->add_option("--replicates", replicates, "Number of data sets")->capture_default_str();
  sim_cmd->add_option("--n", n_override, "Override the scenario's n");
  sim_cmd->add_option("--p", p_override, "Override the scenario's p");
  sim_cmd->add_option("--q", q_override, "Override the scenario's q");
  sim_cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
  sim_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  grid.add(sim_cmd);
  solver.add(sim_cmd);
  add_out(sim_cmd);

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "Numerical checks and experiments");
  diag_cmd->require_subcommand(1);
  long instances = 20;
  auto* grad_cmd = diag_cmd->add_subcommand("grad-check", "Loss gradient vs central differences");
  auto* hess_cmd = diag_cmd->add_subcommand("hessian-check", "Loss Hessian vs central differences");
  for (auto* c : {grad_cmd, hess_cmd}) {
    c->add_option("--instances", instances, "Random instances")->capture_default_str();
    c->add_option("--seed", seed, "Seed")->capture_default_str();
    add_out(c);
  }

  auto* sup_cmd = diag_cmd->add_subcommand("supnorm", "Gradient max-norm at the truth as n grows");
  std::string n_grid_text = "100,200,400,800,1600";
  long p_dim = 50, q_dim = 10;
  double tc = 1.0;
  long mc_reps = 500;
  sup_cmd->add_option("--n-grid", n_grid_text, "Sample sizes")->capture_default_str();
  sup_cmd->add_option("--p", p_dim)->capture_default_str();
  sup_cmd->add_option("--q", q_dim)->capture_default_str();
  sup_cmd->add_option("--noise", noise, "normal | t | lognormal | none")->capture_default_str();
  sup_cmd->add_option("--tau-c", tc, "tau = c sqrt(n/log(pq))")->capture_default_str();
  sup_cmd->add_option("--replicates", mc_reps)->capture_default_str();
  sup_cmd->add_option("--seed", seed)->capture_default_str();
  sup_cmd->add_option("--threads", threads)->capture_default_str();
  add_out(sup_cmd);

  auto* trunc_cmd = diag_cmd->add_subcommand("truncation", "Exceedance-count concentration bound");
  double df = 3.0, delta = 1.0, tau_trunc = 4.0, t_dev = 1.0;
  long n_trunc = 200;
  trunc_cmd->add_option("--df", df, "Student t degrees of freedom")->capture_default_str();
  trunc_cmd->add_option("--delta", delta, "Moment order is 1 + delta")->capture_default_str();
  trunc_cmd->add_option("--n", n_trunc)->capture_default_str();
  trunc_cmd->add_option("--tau", tau_trunc)->capture_default_str();
  trunc_cmd->add_option("--t", t_dev, "Deviation parameter t")->capture_default_str();
  trunc_cmd->add_option("--replicates", mc_reps)->capture_default_str();
  trunc_cmd->add_option("--seed", seed)->capture_default_str();
  trunc_cmd->add_option("--threads", threads)->capture_default_str();
  add_out(trunc_cmd);

  auto* grubbs_cmd = diag_cmd->add_subcommand("grubbs", "Per-column Grubbs test with Bonferroni correction");
  double alpha = 0.05;
  grubbs_cmd->add_option("--y", y_path, "Matrix CSV, one test per column")->required();
  grubbs_cmd->add_option("--alpha", alpha, "Family-wise level")->capture_default_str();
  add_out(grubbs_cmd);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest_path;
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  add_out(replay_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsageError;
  }

  try {
    if (*replay_cmd) {
      const json m = io::read_json(manifest_path);
      if (!m.contains("argv")) throw io::IoError("manifest has no argv");
      std::vector<std::string> replay_args = m.at("argv").get<std::vector<std::string>>();
      replay_args.push_back("--out-dir");
      replay_args.push_back(out_dir);
      return run(replay_args, out, err);
    }

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const auto recorded = replayable_args(args);

    if (*fit_cmd) {
      const Problem problem = load_problem(x_path, y_path, err);
      Hyperparams hp = solver.base();
      hp.lambda = lambda;
      hp.gamma = gamma;
      hp.tau = tau_c ? tau_from_c(*tau_c, problem.n(), problem.p(), problem.q()) : HuberParam::from_value(parse_tau(tau_text));
      const FitResult r = fit(problem, hp);
      write_fit_outputs(dir, r, hp);
      json cfg{{"x", x_path}, {"y", y_path}, {"lambda", lambda}, {"gamma", gamma}, {"tau", tau_json(hp.tau.value())},
               {"solver", solver.to_json()}};
      if (tau_c) cfg["tau_c"] = *tau_c;
      io::write_json(dir / "manifest.json", manifest("fit", recorded, cfg));
      out << "objective " << io::format_double(r.objective) << ", " << r.iterations << " iterations"
          << (r.converged ? "" : " (not converged)") << ", rank " << r.rank_estimate << ", support "
          << r.support.size() << '\n';
      return kOk;
    }

    if (*cv_cmd) {
      const Problem problem = load_problem(x_path, y_path, err);
      CvPlan plan = grid.plan(solver);
      plan.seed = seed;
      plan.threads = threads;
      const CvResult cv = cross_validate(problem, plan);
      io::write_cv_table_csv(dir / "cv_table.csv", cv.cv_table);
      json selected = io::to_json(cv.best);
      selected["tau_c"] = tau_json(cv.best_tau_c);
      io::write_json(dir / "selected.json", selected);
      write_fit_outputs(dir, cv.refit, cv.best);
      io::write_json(dir / "manifest.json",
                     manifest("cv", recorded,
                              {{"x", x_path}, {"y", y_path}, {"grid", grid.to_json()}, {"solver", solver.to_json()},
                               {"seed", seed}}));
      out << "selected lambda " << io::format_double(cv.best.lambda) << ", gamma " << cv.best.gamma << ", tau "
          << io::format_double(cv.best.tau.value()) << '\n';
      return kOk;
    }

    if (*sim_cmd) {
      ScenarioSpec spec = scenario_by_name(scenario);
      spec.noise = parse_noise(noise);
      spec.contamination_frac = contamination;
      if (n_override) spec.n = *n_override;
      if (p_override) spec.p = *p_override;
      if (q_override) spec.q = *q_override;
      std::vector<Method> methods;
      if (method == "both") {
        methods = {Method::Huber, Method::Squared};
      } else {
        methods = {parse_method(method)};
      }
      ScenarioOptions opts;
      opts.cv = grid.plan(solver);
      opts.threads = threads;
      std::vector<ScenarioReport> reports;
      for (Method m : methods) reports.push_back(run_scenario(spec, m, replicates, seed, opts));
      io::write_replicates_csv(dir / "replicates.csv", reports);
      io::write_summary_csv(dir / "summary.csv", reports);
      json cfg{{"scenario", scenario},   {"spec", io::to_json(spec)}, {"method", method},
               {"replicates", replicates}, {"seed", seed},            {"grid", grid.to_json()},
               {"solver", solver.to_json()}};
      io::write_json(dir / "manifest.json", manifest("simulate", recorded, cfg));
      for (const auto& rep : reports) {
        out << to_string(rep.method) << ": mean frob " << io::format_double(rep.summary.mean_frob) << " over "
            << rep.summary.used << " replicates (" << rep.summary.failed << " failed)\n";
      }
      return kOk;
    }

    if (*grad_cmd || *hess_cmd) {
      const bool hessian = hess_cmd->parsed();
      std::mt19937_64 rng(seed);
      double worst = 0.0;
      long compared = 0;
      std::ostringstream csv;
      csv << "instance,max_error,compared\n";
      for (long k = 0; k < instances; ++k) {
        const Eigen::Index p = hessian ? 3 : 4, q = hessian ? 2 : 3;
        CheckInstance inst = random_instance(rng, 40, p, q);
        double inst_err = 0.0;
        long inst_cmp = 0;
        if (kink_distance(inst.problem, inst.A, inst.tau) > 1e-3) {
          const Matrix g = loss_gradient(inst.problem, inst.A, inst.tau);
          if (!hessian) {
            const double gmax = g.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < inst.A.size(); ++i) {
              Matrix plus = inst.A, minus = inst.A;
              const double h = 1e-6 * (1.0 + std::abs(inst.A.data()[i]));
              plus.data()[i] += h;
              minus.data()[i] -= h;
              const double fd = (loss_value(inst.problem, plus, inst.tau) - loss_value(inst.problem, minus, inst.tau)) / (2 * h);
              const double scale = std::max(std::abs(g.data()[i]), 1e-2 * gmax);
              inst_err = std::max(inst_err, std::abs(fd - g.data()[i]) / scale);
              ++inst_cmp;
            }
          } else {
            const Matrix hmat = loss_hessian(inst.problem, inst.A, inst.tau);
            for (Eigen::Index i = 0; i < inst.A.size(); ++i) {
              Matrix plus = inst.A, minus = inst.A;
              const double h = 1e-6 * (1.0 + std::abs(inst.A.data()[i]));
              plus.data()[i] += h;
              minus.data()[i] -= h;
              const Matrix col = (loss_gradient(inst.problem, plus, inst.tau) - loss_gradient(inst.problem, minus, inst.tau)) / (2 * h);
              for (Eigen::Index j = 0; j < col.size(); ++j) inst_err = std::max(inst_err, std::abs(col.data()[j] - hmat(j, i)));
              ++inst_cmp;
            }
          }
        }
        csv << k << ',' << io::format_double(inst_err) << ',' << inst_cmp << '\n';
        worst = std::max(worst, inst_err);
        compared += inst_cmp;
      }
      const double tol = hessian ? 1e-5 : 1e-6;
      std::ofstream(dir / (hessian ? "hessian_check.csv" : "grad_check.csv")) << csv.str();
      io::write_json(dir / "manifest.json",
                     manifest(hessian ? "diagnose hessian-check" : "diagnose grad-check", recorded,
                              {{"instances", instances}, {"seed", seed}, {"tolerance", tol}}));
      out << (hessian ? "hessian" : "gradient") << " check: max error " << io::format_double(worst) << " over "
          << compared << " coordinates (tolerance " << tol << ")\n";
      if (worst > tol) throw CheckFailure("derivative check exceeded tolerance");
      return kOk;
    }

    if (*sup_cmd) {
      SupnormConfig cfg;
      cfg.n_grid.clear();
      for (double v : parse_grid(n_grid_text, false)) cfg.n_grid.push_back(static_cast<Eigen::Index>(v));
      cfg.p = p_dim;
      cfg.q = q_dim;
      if (noise == "none") {
        cfg.noise.reset();
      } else {
        cfg.noise = parse_noise(noise);
      }
      cfg.pattern = (p_dim >= 4 && q_dim >= 4) ? CoefPattern::SparseRank1 : CoefPattern::DenseRank1;
      cfg.tau_c = tc;
      cfg.replicates = mc_reps;
      cfg.seed = seed;
      cfg.threads = threads;
      const SupnormReport rep = gradient_supnorm_experiment(cfg);
      std::ofstream os(dir / "supnorm.csv");
      os << "n,tau,quantile,mean\n";
      for (const auto& r : rep.rows) {
        os << r.n << ',' << io::format_double(r.tau) << ',' << io::format_double(r.quantile) << ','
           << io::format_double(r.mean) << '\n';
      }
      io::write_json(dir / "manifest.json",
                     manifest("diagnose supnorm", recorded,
                              {{"n_grid", n_grid_text}, {"p", p_dim}, {"q", q_dim}, {"noise", noise}, {"tau_c", tc},
                               {"replicates", mc_reps}, {"seed", seed},
                               {"slope", rep.slope ? json(*rep.slope) : json(nullptr)}}));
      out << "log-log slope " << (rep.slope ? io::format_double(*rep.slope) : std::string("n/a")) << '\n';
      return kOk;
    }

    if (*trunc_cmd) {
      const NoiseSpec spec = student_t_noise_spec(df, delta);
      const TruncationReport rep =
          truncation_bound_experiment(spec, student_t_sampler(df), n_trunc, tau_trunc, t_dev, mc_reps, seed, threads);
      json result{{"frequency", rep.frequency}, {"bound", rep.bound},       {"allowed", rep.allowed},
                  {"violations", rep.violations}, {"replicates", rep.replicates}, {"v_delta", spec.v_delta}};
      io::write_json(dir / "truncation.json", result);
      io::write_json(dir / "manifest.json",
                     manifest("diagnose truncation", recorded,
                              {{"df", df}, {"delta", delta}, {"n", n_trunc}, {"tau", tau_trunc}, {"t", t_dev},
                               {"replicates", mc_reps}, {"seed", seed}}));
      out << "violation frequency " << io::format_double(rep.frequency) << " (allowed "
          << io::format_double(rep.allowed) << ")\n";
      if (rep.frequency > rep.allowed) throw CheckFailure("violation frequency above the concentration bound");
      return kOk;
    }

    if (*grubbs_cmd) {
      const Matrix y = io::read_csv(y_path);
      const GrubbsReport rep = grubbs_screen(y, alpha);
      std::ofstream os(dir / "grubbs.csv");
      os << "column,statistic,critical,flagged,skipped\n";
      for (std::size_t j = 0; j < rep.columns.size(); ++j) {
        const auto& c = rep.columns[j];
        os << j << ',' << io::format_double(c.statistic) << ',' << io::format_double(c.critical) << ','
           << (c.flagged ? 1 : 0) << ',' << (c.skipped ? 1 : 0) << '\n';
      }
      io::write_json(dir / "manifest.json",
                     manifest("diagnose grubbs", recorded, {{"y", y_path}, {"alpha", alpha}}));
      out << rep.flagged_count << " of " << rep.columns.size() << " columns flagged at family-wise alpha " << alpha
          << '\n';
      return kOk;
    }
  } catch (const CheckFailure& ex) {
    err << "check failed: " << ex.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace rsrrr::cli
