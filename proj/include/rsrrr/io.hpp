#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsrrr/admm.hpp"
#include "rsrrr/simulate.hpp"
#include "rsrrr/tuning.hpp"

namespace rsrrr::io {

//! I/O or parse failure, carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Reads a numeric CSV. A first row containing any non-numeric field is
//! treated as a header and skipped.
Matrix read_csv(const std::filesystem::path& path);

//! Writes with 17 significant digits so that read_csv round-trips exactly.
void write_csv(const std::filesystem::path& path, const Matrix& m);

std::string format_double(double v);

void write_support_csv(const std::filesystem::path& path, const Support& support);
void write_cv_table_csv(const std::filesystem::path& path, const std::vector<CvEntry>& table);
void write_replicates_csv(const std::filesystem::path& path, const std::vector<ScenarioReport>& reports);
void write_summary_csv(const std::filesystem::path& path, const std::vector<ScenarioReport>& reports);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const Hyperparams& hp);
nlohmann::json to_json(const ScenarioSpec& s);

}  // namespace rsrrr::io
