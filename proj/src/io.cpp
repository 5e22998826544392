#include "rsrrr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rsrrr::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  bool first = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_number(fields[i], values[i]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    first = false;
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(rows.front().size()) + " fields, got " + std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw IoError("'" + path.string() + "' holds no numeric rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (!m.allFinite()) throw IoError("'" + path.string() + "' contains non-finite values");
  return m;
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  auto os = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_support_csv(const std::filesystem::path& path, const Support& support) {
  auto os = open_out(path);
  os << "row,col\n";
  for (const auto& e : support) os << e.row << ',' << e.col << '\n';
}

void write_cv_table_csv(const std::filesystem::path& path, const std::vector<CvEntry>& table) {
  auto os = open_out(path);
  os << "lambda,gamma,tau_c,tau,mean,se,nonconverged_folds,failed\n";
  for (const auto& e : table) {
    os << format_double(e.lambda) << ',' << format_double(e.gamma) << ',' << format_double(e.tau_c) << ','
       << format_double(e.tau) << ',' << format_double(e.mean) << ',' << format_double(e.se) << ','
       << e.nonconverged_folds << ',' << (e.failed ? 1 : 0) << '\n';
  }
}

namespace {
std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
}  // namespace

void write_replicates_csv(const std::filesystem::path& path, const std::vector<ScenarioReport>& reports) {
  auto os = open_out(path);
  os << "method,noise,contamination,replicate,seed,failed,frob,tpr,fpr,lambda,gamma,tau,tau_c,iterations,converged\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      os << to_string(rep.method) << ',' << to_string(rep.spec.noise) << ','
         << format_double(rep.spec.contamination_frac) << ',' << r.replicate << ',' << r.seed << ','
         << (r.failed ? 1 : 0) << ',';
      if (r.failed) {
        os << ",,,,,,,,\n";
        continue;
      }
      os << format_double(r.metrics.frob_error) << ',' << opt(r.metrics.tpr) << ',' << opt(r.metrics.fpr) << ','
         << format_double(r.lambda) << ',' << format_double(r.gamma) << ',' << format_double(r.tau) << ','
         << format_double(r.tau_c) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<ScenarioReport>& reports) {
  auto os = open_out(path);
  os << "method,noise,contamination,mean_frob,se_frob,mean_tpr,se_tpr,mean_fpr,se_fpr,used,failed\n";
  for (const auto& rep : reports) {
    const Summary& s = rep.summary;
    os << to_string(rep.method) << ',' << to_string(rep.spec.noise) << ','
       << format_double(rep.spec.contamination_frac) << ',' << format_double(s.mean_frob) << ',' << opt(s.se_frob)
       << ',' << opt(s.mean_tpr) << ',' << opt(s.se_tpr) << ',' << opt(s.mean_fpr) << ',' << opt(s.se_fpr) << ','
       << s.used << ',' << s.failed << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("'" + path.string() + "': " + ex.what());
  }
}

nlohmann::json to_json(const FitResult& r) {
  return {{"objective", r.objective},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"rank_estimate", r.rank_estimate},
          {"support_size", r.support.size()},
          {"primal_residuals", {{"d_minus_xa", r.residuals.d}, {"z_minus_a", r.residuals.z}, {"w_minus_a", r.residuals.w}}}};
}

nlohmann::json to_json(const Hyperparams& hp) {
  return {{"lambda", hp.lambda},
          {"gamma", hp.gamma},
          {"tau", hp.tau.is_infinite() ? nlohmann::json("inf") : nlohmann::json(hp.tau.value())},
          {"rho", hp.rho},
          {"eps", hp.eps},
          {"max_iter", hp.max_iter}};
}

nlohmann::json to_json(const ScenarioSpec& s) {
  return {{"n", s.n},
          {"p", s.p},
          {"q", s.q},
          {"pattern", to_string(s.pattern)},
          {"noise", to_string(s.noise)},
          {"contamination_frac", s.contamination_frac},
          {"contamination_range", {s.contamination_range.first, s.contamination_range.second}}};
}

}  // namespace rsrrr::io
