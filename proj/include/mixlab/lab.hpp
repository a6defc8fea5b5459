#pragma once

// Configuration-driven experiment runner behind the `mixlab` tool.

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mixlab::lab {

/// Schema violations; `diagnostics` lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

/// Valid configuration whose experiment cannot run on the chosen model
/// (e.g. exact mixing on the supermarket chain's unbounded state space).
class Refused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

extern const std::vector<std::string> kModels;
extern const std::vector<std::string> kExperiments;

struct ExperimentConfig {
  std::string model;
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t replicas = 0;
  unsigned threads = 0;
  std::string out = "mixlab-out";
  /// Model and experiment parameters with defaults filled in.
  nlohmann::json params = nlohmann::json::object();

  /// Canonical echo of the resolved configuration.
  nlohmann::json to_json() const;
};

struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

/// Validates the document against the schema (unknown keys rejected),
/// applies overrides and fills defaults. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

struct Csv {
  std::string name;  // file name inside the output directory
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// 17 significant digits for reals, plain decimal for integers.
std::string cell(double v);
template <std::integral T>
std::string cell(T v) {
  return std::to_string(v);
}
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

struct RunReport {
  nlohmann::json config;
  std::vector<Csv> tables;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json verdicts = nlohmann::json::object();
  bool consistent = true;
  double wall_seconds = 0.0;

  /// report.json content: config echo, metrics, verdicts, versions.
  /// Wall-clock time is kept out of it so reruns are byte-identical.
  nlohmann::json document() const;
};

/// Runs one experiment. Throws ConfigError, Refused, BudgetExceeded and
/// module errors.
RunReport run(const ExperimentConfig& config);

/// Writes every table as CSV, report.json and timing.json into `dir`.
void write_report(const RunReport& report, const std::string& dir);

std::string artifact_version();
nlohmann::json versions();

/// 0: consistent, 2: inconsistent, 1: error.
int exit_code(const RunReport& report);

}  // namespace mixlab::lab
