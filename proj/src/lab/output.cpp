#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "mixlab/format.hpp"
#include "mixlab/lab.hpp"

#ifndef MIXLAB_VERSION
#define MIXLAB_VERSION "unknown"
#endif

namespace mixlab::lab {

using nlohmann::json;

std::string cell(double v) { return format_double(v); }

std::string Csv::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

std::string artifact_version() { return MIXLAB_VERSION; }

json versions() {
  return {{"mixlab", artifact_version()},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json RunReport::document() const {
  json tables_index = json::array();
  for (const auto& t : tables) tables_index.push_back({{"file", t.name}, {"columns", t.columns}});
  return {{"config", config},
          {"tables", tables_index},
          {"metrics", metrics},
          {"verdicts", verdicts},
          {"verdict", consistent ? "consistent" : "inconsistent"},
          {"versions", versions()}};
}

void write_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << content;
  };
  for (const auto& t : report.tables) put(t.name, t.str());
  put("report.json", report.document().dump(2) + "\n");
  put("timing.json", json{{"wall_clock_seconds", report.wall_seconds}}.dump(2) + "\n");
}

int exit_code(const RunReport& report) { return report.consistent ? 0 : 2; }

}  // namespace mixlab::lab
