#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rsrrr/cli.hpp"
#include "rsrrr/io.hpp"
#include "rsrrr/simulate.hpp"

using namespace rsrrr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path = fs::temp_directory_path() / ("rsrrr_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * normal(rng);
  return m;
}

}  // namespace

TEST_CASE("CSV round trip keeps every bit") {
  TempDir dir;
  std::mt19937_64 rng(41);
  Matrix m = random_matrix(rng, 7, 4, 1e3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.0;
  m(2, 2) = 5e-324;
  m(3, 3) = std::numeric_limits<double>::max();
  io::write_csv(dir / "m.csv", m);
  const Matrix back = io::read_csv(dir / "m.csv");
  CHECK(back == m);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("CSV header detection and errors") {
  TempDir dir;
  std::ofstream(dir / "h.csv") << "a,b\n1,2\n3,4\n";
  const Matrix h = io::read_csv(dir / "h.csv");
  CHECK(h.rows() == 2);
  CHECK(h(1, 0) == 3.0);

  std::ofstream(dir / "plain.csv") << "1,2\n3,4\n";
  CHECK(io::read_csv(dir / "plain.csv").rows() == 2);

  std::ofstream(dir / "ragged.csv") << "1,2\n3\n";
  CHECK_THROWS_AS(io::read_csv(dir / "ragged.csv"), io::IoError);
  std::ofstream(dir / "text.csv") << "1,2\n3,x\n";
  CHECK_THROWS_AS(io::read_csv(dir / "text.csv"), io::IoError);
  CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), io::IoError);
}

TEST_CASE("grid parsing") {
  CHECK(cli::parse_grid("1,2.5, 3", false) == std::vector<double>{1.0, 2.5, 3.0});
  const auto g = cli::parse_grid("0.5,inf", true);
  CHECK(std::isinf(g[1]));
  CHECK_THROWS(cli::parse_grid("0.5,inf", false));
  CHECK_THROWS(cli::parse_grid("0.5,,1", false));
  CHECK_THROWS(cli::parse_grid("abc", false));
  CHECK_THROWS(cli::parse_grid("", false));
}

TEST_CASE("fit on the noiseless least-squares fixture") {
  TempDir dir;
  std::mt19937_64 rng(42);
  Matrix x = random_matrix(rng, 6, 2);
  x /= x.cwiseAbs().maxCoeff();
  Matrix a(2, 1);
  a << 1.5, -0.7;
  io::write_csv(dir / "x.csv", x);
  io::write_csv(dir / "y.csv", x * a);
  const Outcome r = run({"fit", "--x", (dir / "x.csv").string(), "--y", (dir / "y.csv").string(), "--lambda", "0",
                         "--tau", "100", "--eps", "1e-16", "--max-iter", "1000000", "--out-dir", dir.path.string()});
  REQUIRE(r.code == 0);
  const Matrix coef = io::read_csv(dir / "coefficients.csv");
  CHECK((coef - a).norm() < 1e-4);
  const auto summary = io::read_json(dir / "summary.json");
  CHECK(summary.at("converged").get<bool>());
  CHECK(summary.contains("objective"));
  CHECK(summary.contains("rank_estimate"));
  CHECK(fs::exists(dir / "support.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("fit input errors exit with status 2") {
  TempDir dir;
  io::write_csv(dir / "x.csv", Matrix::Ones(6, 2) * 0.5);
  io::write_csv(dir / "y.csv", Matrix::Ones(5, 1));
  Outcome r = run({"fit", "--x", (dir / "x.csv").string(), "--y", (dir / "y.csv").string(), "--out-dir",
                   dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("6") != std::string::npos);

  r = run({"fit", "--x", (dir / "nope.csv").string(), "--y", (dir / "y.csv").string(), "--out-dir",
           dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("nope.csv") != std::string::npos);

  CHECK(run({"fit"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("unstandardized design only warns") {
  TempDir dir;
  std::mt19937_64 rng(43);
  io::write_csv(dir / "x.csv", random_matrix(rng, 10, 2, 5.0));
  io::write_csv(dir / "y.csv", random_matrix(rng, 10, 1));
  const Outcome r = run({"fit", "--x", (dir / "x.csv").string(), "--y", (dir / "y.csv").string(), "--lambda", "0.1",
                         "--out-dir", dir.path.string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("cv with a single-point grid reproduces fit") {
  TempDir dir;
  ScenarioSpec spec;
  spec.n = 60;
  spec.p = 8;
  spec.q = 5;
  spec.seed = 9;
  const GeneratedData d = generate(spec);
  io::write_csv(dir / "x.csv", d.problem.x());
  io::write_csv(dir / "y.csv", d.problem.y());
  const std::string x = (dir / "x.csv").string(), y = (dir / "y.csv").string();
  fs::create_directories(dir / "cv");
  fs::create_directories(dir / "fit");
  REQUIRE(run({"cv", "--x", x, "--y", y, "--lambda-grid", "0.03", "--gamma-grid", "3", "--tau-c-grid", "0.8",
               "--out-dir", (dir / "cv").string()})
              .code == 0);
  REQUIRE(run({"fit", "--x", x, "--y", y, "--lambda", "0.03", "--gamma", "3", "--tau-c", "0.8", "--out-dir",
               (dir / "fit").string()})
              .code == 0);
  CHECK(slurp(dir / "cv" / "coefficients.csv") == slurp(dir / "fit" / "coefficients.csv"));
  CHECK(slurp(dir / "cv" / "support.csv") == slurp(dir / "fit" / "support.csv"));

  const auto selected = io::read_json(dir / "cv" / "selected.json");
  CHECK(selected.at("gamma").get<double>() == 3.0);

  CHECK(run({"cv", "--x", x, "--y", y, "--gamma-grid", "3;4", "--out-dir", (dir / "cv").string()}).code == 2);
  CHECK(run({"cv", "--x", x, "--y", y, "--tau-c-grid", "zero", "--out-dir", (dir / "cv").string()}).code == 2);
}

TEST_CASE("cv selects gamma from the grid") {
  TempDir dir;
  ScenarioSpec spec;
  spec.n = 60;
  spec.p = 8;
  spec.q = 6;
  const GeneratedData d = generate(spec);
  io::write_csv(dir / "x.csv", d.problem.x());
  io::write_csv(dir / "y.csv", d.problem.y());
  REQUIRE(run({"cv", "--x", (dir / "x.csv").string(), "--y", (dir / "y.csv").string(), "--lambda-count", "5",
               "--lambda-ratio", "0.05", "--tau-c-grid", "0.6,1.2", "--out-dir", dir.path.string()})
              .code == 0);
  const double gamma = io::read_json(dir / "selected.json").at("gamma").get<double>();
  CHECK((gamma == 2.5 || gamma == 3.0 || gamma == 3.5 || gamma == 4.0));
  CHECK(slurp(dir / "cv_table.csv").find("lambda") == 0);
}

TEST_CASE("simulate is deterministic and lays out one row per method") {
  TempDir dir;
  const std::vector<std::string> base{"simulate", "--scenario", "table2-rank1", "--n", "40", "--p", "8",
                                      "--q", "6", "--replicates", "3", "--seed", "5", "--lambda-count", "3",
                                      "--lambda-ratio", "0.05", "--gamma-grid", "3", "--tau-c-grid", "1", "--folds",
                                      "3"};
  auto with_dir = [&](std::vector<std::string> args, const fs::path& d) {
    fs::create_directories(d);
    args.push_back("--out-dir");
    args.push_back(d.string());
    return run(args);
  };
  REQUIRE(with_dir(base, dir / "a").code == 0);
  REQUIRE(with_dir(base, dir / "b").code == 0);
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(slurp(dir / "a" / "replicates.csv") == slurp(dir / "b" / "replicates.csv"));
  CHECK(slurp(dir / "a" / "summary.csv")
            .rfind("method,noise,contamination,mean_frob,se_frob,mean_tpr,se_tpr,mean_fpr,se_fpr", 0) == 0);

  auto both = base;
  both[10] = "1";
  both.insert(both.end(), {"--method", "both"});
  REQUIRE(with_dir(both, dir / "c").code == 0);
  std::istringstream lines(slurp(dir / "c" / "summary.csv"));
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].rfind("huber,", 0) == 0);
  CHECK(rows[2].rfind("squared,", 0) == 0);

  auto bad = base;
  bad[2] = "table7-rank1";
  CHECK(with_dir(bad, dir / "d").code == 2);
}

TEST_CASE("replay reproduces outputs bitwise") {
  TempDir dir;
  fs::create_directories(dir / "first");
  fs::create_directories(dir / "second");
  REQUIRE(run({"simulate", "--scenario", "table2-rank1", "--n", "40", "--p", "8", "--q", "6", "--replicates", "2",
               "--lambda-count", "3", "--lambda-ratio", "0.05", "--gamma-grid", "3", "--tau-c-grid", "1", "--folds",
               "3", "--noise", "t", "--contamination", "0.05", "--out-dir", (dir / "first").string()})
              .code == 0);
  REQUIRE(run({"replay", "--manifest", (dir / "first" / "manifest.json").string(), "--out-dir",
               (dir / "second").string()})
              .code == 0);
  for (const char* f : {"summary.csv", "replicates.csv", "manifest.json"})
    CHECK_MESSAGE(slurp(dir / "first" / f) == slurp(dir / "second" / f), f);
}

TEST_CASE("diagnose subcommands") {
  TempDir dir;
  const std::string out = dir.path.string();
  CHECK(run({"diagnose", "grad-check", "--instances", "20", "--out-dir", out}).code == 0);
  CHECK(run({"diagnose", "hessian-check", "--instances", "5", "--out-dir", out}).code == 0);
  CHECK(run({"diagnose", "truncation", "--replicates", "2000", "--out-dir", out}).code == 0);
  const Outcome sup =
      run({"diagnose", "supnorm", "--replicates", "50", "--n-grid", "100,200,400", "--out-dir", out});
  CHECK(sup.code == 0);
  CHECK(fs::exists(dir / "supnorm.csv"));

  std::mt19937_64 rng(45);
  Matrix y = random_matrix(rng, 118, 20);
  io::write_csv(dir / "null.csv", y);
  const Outcome null = run({"diagnose", "grubbs", "--y", (dir / "null.csv").string(), "--out-dir", out});
  CHECK(null.code == 0);
  CHECK_MESSAGE(null.out.find("0 of 20") == 0, null.out, null.err);

  y(40, 7) = 10.0 * y.col(7).norm() / std::sqrt(118.0);
  io::write_csv(dir / "outlier.csv", y);
  const Outcome hit = run({"diagnose", "grubbs", "--y", (dir / "outlier.csv").string(), "--out-dir", out});
  CHECK(hit.code == 0);
  std::istringstream lines(slurp(dir / "grubbs.csv"));
  std::string line;
  std::getline(lines, line);
  for (int j = 0; j <= 7; ++j) std::getline(lines, line);
  CHECK(line.rfind("7,", 0) == 0);
  CHECK(line.find(",1,0") != std::string::npos);
}

TEST_CASE("the installed binary reports exit codes") {
  const std::string bin = RSRRR_CLI_PATH;
  CHECK(std::system((bin + " --version > /dev/null").c_str()) == 0);
  const int status = std::system((bin + " fit --x /nonexistent.csv --y /nonexistent.csv 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
