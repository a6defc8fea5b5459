#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixlab/exact.hpp"
#include "mixlab/ising.hpp"
#include "mixlab/lab.hpp"
#include "mixlab/parallel.hpp"

using namespace mixlab;
using namespace mixlab::lab;
using nlohmann::json;

namespace {

std::vector<std::string> diagnostics_of(const json& doc, const Overrides& o = {}) {
  try {
    parse_config(doc, o);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

const Csv& table(const RunReport& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  return r.tables.front();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
  CHECK(diagnostics_of(json::parse(R"({"model":"ising","n":6,"beta":0.5,"experiment":"mix"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","n":6,"beta":0.5,"experiment":"mix","bogus":1})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"potts","n":6,"experiment":"mix"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","beta":0.5,"experiment":"mix"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","n":1,"beta":0.5,"experiment":"mix"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","n":"6","beta":0.5,"experiment":"mix"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"supermarket","n":10,"lambda":1.0,"d":2,"experiment":"maxq"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","n":6,"beta":0.5})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"linext","n":6,"experiment":"ode"})")).empty());
  CHECK_FALSE(diagnostics_of(json::parse(R"([1,2])")).empty());

  const auto both = diagnostics_of(json::parse(R"({"model":"ising","n":1,"beta":-1,"experiment":"mix","x":1})"));
  CHECK(both.size() >= 3);

  Overrides o;
  o.experiment = "conc";
  CHECK_FALSE(diagnostics_of(json::parse(R"({"model":"ising","n":6,"beta":0.5,"experiment":"mix"})"), o).empty());
  CHECK(diagnostics_of(json::parse(R"({"model":"ising","n":6,"beta":0.5})"), o).empty());

  Overrides s;
  s.seed = 77;
  s.replicas = 123;
  const auto c = parse_config(json::parse(R"({"model":"ising","n":6,"beta":0.5,"experiment":"conc","seed":5})"), s);
  CHECK(c.seed == 77);
  CHECK(c.replicas == 123);
  CHECK(c.params.contains("t"));

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("mix run matches the exact module") {
  const auto cfg = parse_config(json::parse(R"({"model":"ising","n":6,"beta":0.5,"experiment":"mix"})"));
  const auto rep = run(cfg);
  CHECK(exit_code(rep) == 0);
  const auto& t = table(rep, "distance_curve.csv");
  CHECK(t.columns == std::vector<std::string>{"t", "distance"});
  const Kernel k = build_kernel(IsingChain(6, 0.5));
  const auto mt = mixing_time(k, 0.25);
  REQUIRE(mt.mixed());
  CHECK(rep.metrics["t_mix"].get<std::size_t>() == *mt.steps);
  CHECK(rep.metrics["max_abs_error_vs_gibbs"].get<double>() <= 1e-10);
  CHECK(t.str().substr(0, 11) == "t,distance\n");
}

TEST_CASE("table headers") {
  auto headers = [](const char* doc, const char* name) {
    auto cfg = parse_config(json::parse(doc));
    return table(run(cfg), name).columns;
  };
  CHECK(headers(R"({"model":"ising","n":4,"beta":0.5,"experiment":"profile","T":3})", "profile.csv") ==
        std::vector<std::string>{"i", "alpha_i", "provenance", "lower_conf", "upper_conf"});
  CHECK(headers(R"({"model":"ising","n":4,"beta":0.5,"experiment":"conc","replicas":200})", "comparison.csv") ==
        std::vector<std::string>{"u", "bound", "freq", "se", "margin"});
  CHECK(headers(R"({"model":"supermarket","n":10,"lambda":0.7,"d":2,"experiment":"ode","t_end":20,"sim_steps":0})",
                "fluid.csv") == std::vector<std::string>{"k", "v", "fixed_point", "abs_error"});
  CHECK(headers(R"({"model":"supermarket","n":50,"lambda":0.7,"d":2,"experiment":"maxq","samples":20})",
                "max_queue.csv") == std::vector<std::string>{"value", "count", "fraction"});
  CHECK(headers(R"({"model":"supermarket","n":20,"lambda":0.7,"d":2,"experiment":"chaos","snapshots":50})",
                "chaos.csv") ==
        std::vector<std::string>{"tv", "bootstrap_se", "null_mean", "null_sd", "excess", "z", "tuples", "snapshots"});
  CHECK(headers(R"({"model":"ising","n":50,"beta":0.5,"experiment":"cutoff","replicas":200,"gammas":[0]})",
                "cutoff.csv") ==
        std::vector<std::string>{"gamma", "t", "tv_plugin", "ks", "lower_bound", "upper_estimate", "upper_bound"});
}

TEST_CASE("refused runs") {
  CHECK_THROWS_AS(run(parse_config(json::parse(R"({"model":"supermarket","n":10,"lambda":0.7,"d":2,"experiment":"mix"})"))),
                  Refused);
  CHECK_THROWS_AS(run(parse_config(json::parse(R"({"model":"ising","n":50,"beta":1.2,"experiment":"cutoff"})"))), Refused);
  CHECK_THROWS_AS(run(parse_config(json::parse(R"({"model":"ising","n":40,"beta":0.5,"experiment":"mix"})"))), Refused);
}

TEST_CASE("inconsistent verdict maps to exit code 2") {
  const auto cfg = parse_config(json::parse(R"({"model":"linext","n":32,"experiment":"conc"})"));
  const auto rep = run(cfg);
  CHECK_FALSE(rep.consistent);
  CHECK(exit_code(rep) == 2);
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "mixlab_lab_test";
  fs::remove_all(base);
  const char* doc = R"({"model":"supermarket","n":30,"lambda":0.8,"d":2,"experiment":"profile","T":5,"pairs":4,"replicas":300})";
  std::vector<std::string> reports, csvs;
  for (unsigned threads : {1u, 1u, 3u}) {
    Overrides o;
    o.threads = threads;
    const auto cfg = parse_config(json::parse(doc), o);
    set_thread_count(cfg.threads);
    const auto rep = run(cfg);
    const fs::path dir = base / std::to_string(reports.size());
    write_report(rep, dir.string());
    reports.push_back(slurp(dir / "report.json"));
    csvs.push_back(slurp(dir / "profile.csv"));
    CHECK(fs::exists(dir / "timing.json"));
  }
  set_thread_count(0);
  CHECK(reports[0] == reports[1]);
  CHECK(reports[0] == reports[2]);
  CHECK(csvs[0] == csvs[1]);
  CHECK(csvs[0] == csvs[2]);
  const auto j = json::parse(reports[0]);
  CHECK(j.contains("config"));
  CHECK(j.contains("versions"));
  CHECK(j["config"]["seed"] == 1);
  fs::remove_all(base);
}

TEST_CASE("CSV cells") {
  CHECK(cell(0.1) == "0.10000000000000001");
  CHECK(cell(3) == "3");
  Csv c{"x.csv", {"a", "b"}, {}};
  c.add({"1", "2"});
  CHECK(c.str() == "a,b\n1,2\n");
}
