#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace branchlab {

inline constexpr const char* kVersion = "0.1.0";

/// Thrown on bad experiment ids, unknown config fields, or wrong types;
/// maps to exit code 2 at the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class OutputFormat { Csv, Json, Both };

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t master_seed = 1;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::Both;
  bool serial = true;

  nlohmann::json to_json() const;
};

/// Parse and validate a config document for the named experiment. Unknown
/// fields are rejected with their path.
ExperimentConfig parse_config(const std::string& experiment, const nlohmann::json& doc);

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string tolerance;
};

struct RunManifest {
  ExperimentConfig config;
  std::string version = kVersion;
  double wall_clock_seconds = 0.0;
  std::vector<CheckResult> checks;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> artifacts;  // files written, relative to out_dir

  bool all_passed() const;
  nlohmann::json to_json() const;
};

/// Execute the named experiment, write its CSV/JSON artifacts plus
/// manifest.json under config.out_dir, and return the manifest.
RunManifest run(const ExperimentConfig& config);

/// One row per check across manifests; exit code 1 iff any check failed.
struct SummaryTable {
  std::string table;
  int exit_code = 0;
  std::string warning;
};

SummaryTable report_summary(const std::vector<nlohmann::json>& manifests);

/// 17-significant-digit float formatting used by all CSV output.
std::string format_double(double v);

}  // namespace branchlab
