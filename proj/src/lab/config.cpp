#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "mixlab/lab.hpp"
#include "mixlab/supermarket.hpp"

namespace mixlab::lab {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error("invalid configuration:\n  " + [&] {
        std::string s;
        for (const auto& d : diagnostics) s += (s.empty() ? "" : "\n  ") + d;
        return s;
      }()),
      diagnostics_(std::move(diagnostics)) {}

const std::vector<std::string> kModels = {"ising", "supermarket", "linext", "kernel"};
const std::vector<std::string> kExperiments = {"mix", "conc", "profile", "ode", "maxq", "chaos", "cutoff"};

namespace {

enum class Type { Int, Real, Bool, String, RealList, IntList };

struct Param {
  Type type;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool required = false;
  bool lo_open = false;
  bool hi_open = false;
};

using ParamTable = std::map<std::string, Param>;

const double kInf = std::numeric_limits<double>::infinity();

const std::map<std::string, ParamTable>& model_params() {
  static const std::map<std::string, ParamTable> t = {
      {"ising", {{"n", {Type::Int, 2, 10000, true}}, {"beta", {Type::Real, 0, kInf, true}}}},
      {"supermarket",
       {{"n", {Type::Int, 1, 1e7, true}},
        {"lambda", {Type::Real, 0, 1, true, true, true}},
        {"d", {Type::Int, 1, 64, true}}}},
      {"linext", {{"n", {Type::Int, 2, 1e6, true}}}},
      {"kernel", {{"kernel_file", {Type::String, 0, 0, true}}}},
  };
  return t;
}

const std::map<std::string, ParamTable>& experiment_params() {
  static const std::map<std::string, ParamTable> t = {
      {"mix", {{"eps", {Type::Real, 0, 1, false, true, true}},
               {"t_max", {Type::Int, 0, 1e7}},
               {"t_cap", {Type::Int, 1, 1e9}}}},
      {"conc", {{"t", {Type::Int, 0, 1e12}},
                {"u_max", {Type::Real, 0, kInf, false, true}},
                {"u_points", {Type::Int, 1, 10000}},
                {"fit_sizes", {Type::IntList, 2, 12}},
                {"c2", {Type::Real, 0, kInf, false, true}},
                {"x0", {Type::Int, 0, 1e9}}}},
      {"profile", {{"T", {Type::Int, 1, 100000}},
                   {"pairs", {Type::Int, 1, 100000}},
                   {"mode", {Type::String}},
                   {"c", {Type::Real, 0, kInf, false, true}},
                   {"burn_in", {Type::Int, 0, 1e12}}}},
      {"ode", {{"t_end", {Type::Real, 0, 1e7}},
               {"dt", {Type::Real, 0, 10, false, true}},
               {"k_max", {Type::Int, 1, 1000}},
               {"tol", {Type::Real, 0, 1, false, true}},
               {"sim_steps", {Type::Int, 0, 1e12}},
               {"burn_in", {Type::Int, 0, 1e12}},
               {"level_k", {Type::Int, 1, 1000}},
               {"level_tol", {Type::Real, 0, 1, false, true}}}},
      {"maxq", {{"samples", {Type::Int, 1, 1e8}},
                {"spacing", {Type::Int, 1, 1e12}},
                {"burn_in", {Type::Int, 0, 1e12}},
                {"mass", {Type::Real, 0, 1}}}},
      {"chaos", {{"snapshots", {Type::Int, 1, 1e8}},
                 {"spacing", {Type::Int, 1, 1e12}},
                 {"burn_in", {Type::Int, 0, 1e12}},
                 {"k_max", {Type::Int, 1, 100}},
                 {"r", {Type::Int, 2, 8}},
                 {"bootstrap", {Type::Int, 0, 100000}},
                 {"permutations", {Type::Int, 0, 100000}}}},
      {"cutoff", {{"gammas", {Type::RealList, -1e6, 1e6}}}},
  };
  return t;
}

const std::set<std::string> kCommon = {"model", "experiment", "seed", "replicas", "threads", "out"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string type_name(Type t) {
  switch (t) {
    case Type::Int: return "integer";
    case Type::Real: return "number";
    case Type::Bool: return "boolean";
    case Type::String: return "string";
    case Type::RealList: return "array of numbers";
    case Type::IntList: return "array of integers";
  }
  return "?";
}

void check_range(const std::string& key, double v, const Param& p, std::vector<std::string>& diag) {
  const bool below = p.lo_open ? !(v > p.lo) : !(v >= p.lo);
  const bool above = p.hi_open ? !(v < p.hi) : !(v <= p.hi);
  if (below || above) {
    std::ostringstream os;
    os << key << ": " << v << " outside " << (p.lo_open ? "(" : "[") << p.lo << ", " << p.hi
       << (p.hi_open ? ")" : "]");
    diag.push_back(os.str());
  }
}

void check_value(const std::string& key, const json& v, const Param& p, std::vector<std::string>& diag) {
  auto bad = [&] { diag.push_back(key + ": expected " + type_name(p.type)); };
  switch (p.type) {
    case Type::Int:
      if (!v.is_number_integer()) return bad();
      check_range(key, v.get<double>(), p, diag);
      return;
    case Type::Real:
      if (!v.is_number()) return bad();
      check_range(key, v.get<double>(), p, diag);
      return;
    case Type::Bool:
      if (!v.is_boolean()) return bad();
      return;
    case Type::String:
      if (!v.is_string()) return bad();
      return;
    case Type::RealList:
    case Type::IntList:
      if (!v.is_array() || v.empty()) return bad();
      for (const auto& e : v) {
        if (p.type == Type::IntList ? !e.is_number_integer() : !e.is_number()) return bad();
        check_range(key + "[]", e.get<double>(), p, diag);
      }
      return;
  }
}

double nlogn(double n) { return n * std::log(n); }

// Defaults that depend on the model parameters.
void fill_defaults(ExperimentConfig& c) {
  json& p = c.params;
  auto def = [&p](const char* k, const json& v) {
    if (!p.contains(k)) p[k] = v;
  };
  const double n = p.contains("n") ? p["n"].get<double>() : 0.0;
  if (c.experiment == "mix") {
    def("eps", 0.25);
    def("t_max", 200);
    def("t_cap", 1000000);
    if (c.replicas == 0) c.replicas = 1;
  } else if (c.experiment == "conc") {
    if (c.model == "ising") {
      def("t", static_cast<long long>(std::ceil(10 * nlogn(n))));
      def("u_max", 3 * std::sqrt(n));
      def("fit_sizes", json::array({2, 3, 4, 5, 6, 7, 8}));
    } else if (c.model == "linext") {
      def("t", static_cast<long long>(2 * n * n * n));
      def("u_max", n / 2);
      def("c2", 2.0);
    } else if (c.model == "supermarket") {
      def("t", static_cast<long long>(std::ceil(20 * nlogn(std::max(n, 2.0)))));
      def("u_max", 3 * std::sqrt(p["t"].get<double>()));
    } else {
      def("t", 100);
      def("x0", 0);
    }
    def("u_points", 20);
    if (c.replicas == 0) c.replicas = c.model == "linext" ? 1000 : 2000;
  } else if (c.experiment == "profile") {
    def("T", 10);
    def("pairs", 20);
    if (c.model == "ising") {
      def("mode", n <= 8 ? "exact" : "mc");
    } else if (c.model == "supermarket") {
      def("mode", "mc");
      def("c", 2.0);
      def("burn_in", static_cast<long long>(default_burn_in(static_cast<int>(std::max(n, 2.0)), 20)));
    } else {
      def("mode", "exact");
    }
    if (c.replicas == 0) c.replicas = 2000;
  } else if (c.experiment == "ode") {
    const double lam = p.contains("lambda") && p["lambda"].is_number() ? p["lambda"].get<double>() : 0.5;
    def("t_end", std::max(200.0, 40.0 / std::pow(1.0 - std::sqrt(lam), 2)));
    def("dt", 0.01);
    def("tol", 1e-6);
    def("sim_steps", 0);
    def("burn_in", static_cast<long long>(default_burn_in(static_cast<int>(std::max(n, 2.0)), 20)));
    def("level_k", 3);
    def("level_tol", 0.02);
    if (c.replicas == 0) c.replicas = 1;
  } else if (c.experiment == "maxq") {
    def("samples", 200);
    def("spacing", static_cast<long long>(n));
    def("burn_in", static_cast<long long>(default_burn_in(static_cast<int>(std::max(n, 2.0)), 20)));
    def("mass", 0.9);
    if (c.replicas == 0) c.replicas = 1;
  } else if (c.experiment == "chaos") {
    def("snapshots", 400);
    def("spacing", static_cast<long long>(20 * n));
    def("burn_in", static_cast<long long>(default_burn_in(static_cast<int>(std::max(n, 2.0)), 20)));
    def("k_max", 4);
    def("r", 2);
    def("bootstrap", 200);
    def("permutations", 50);
    if (c.replicas == 0) c.replicas = 1;
  } else if (c.experiment == "cutoff") {
    def("gammas", json::array({-4, -3, -2, -1, 0, 1, 2, 3, 4}));
    if (c.replicas == 0) c.replicas = 4000;
  }
}

const std::map<std::string, std::vector<std::string>>& allowed_models() {
  static const std::map<std::string, std::vector<std::string>> t = {
      {"mix", {"ising", "linext", "kernel", "supermarket"}},  // supermarket refused at run time
      {"conc", {"ising", "linext", "supermarket", "kernel"}},
      {"profile", {"ising", "linext", "supermarket", "kernel"}},
      {"ode", {"supermarket"}},
      {"maxq", {"supermarket"}},
      {"chaos", {"supermarket"}},
      {"cutoff", {"ising"}},
  };
  return t;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j = params;
  j["model"] = model;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replicas"] = replicas;
  return j;
}

ExperimentConfig parse_config(const json& doc, const Overrides& ov) {
  std::vector<std::string> diag;
  if (!doc.is_object()) throw ConfigError({"top level must be a JSON object"});

  ExperimentConfig c;
  if (!doc.contains("model") || !doc["model"].is_string()) {
    diag.push_back("model: required string, one of {" + join(kModels) + "}");
  } else if (!contains(kModels, doc["model"].get<std::string>())) {
    diag.push_back("model: unknown model '" + doc["model"].get<std::string>() + "'; expected one of {" +
                   join(kModels) + "}");
  } else {
    c.model = doc["model"].get<std::string>();
  }
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_string() || !contains(kExperiments, doc["experiment"].get<std::string>())) {
      diag.push_back("experiment: expected one of {" + join(kExperiments) + "}");
    } else {
      c.experiment = doc["experiment"].get<std::string>();
    }
  }
  if (ov.experiment) {
    if (!c.experiment.empty() && c.experiment != *ov.experiment) {
      diag.push_back("experiment: config says '" + c.experiment + "' but the subcommand is '" +
                     *ov.experiment + "'");
    }
    c.experiment = *ov.experiment;
  }
  if (c.experiment.empty() && !doc.contains("experiment")) {
    diag.push_back("experiment: required (in the config or as a subcommand)");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) diag.push_back("seed: expected unsigned 64-bit integer");
    else c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("replicas")) {
    if (!doc["replicas"].is_number_unsigned() || doc["replicas"].get<std::uint64_t>() == 0) {
      diag.push_back("replicas: expected positive integer");
    } else {
      c.replicas = doc["replicas"].get<std::size_t>();
    }
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_unsigned() || doc["threads"].get<std::uint64_t>() > 4096) {
      diag.push_back("threads: expected integer in [0, 4096]");
    } else {
      c.threads = doc["threads"].get<unsigned>();
    }
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string() || doc["out"].get<std::string>().empty()) diag.push_back("out: expected non-empty string");
    else c.out = doc["out"].get<std::string>();
  }

  const ParamTable* mp = c.model.empty() ? nullptr : &model_params().at(c.model);
  const ParamTable* ep = c.experiment.empty() ? nullptr : &experiment_params().at(c.experiment);
  for (const auto& [key, value] : doc.items()) {
    if (kCommon.count(key)) continue;
    const Param* spec = nullptr;
    if (mp && mp->count(key)) spec = &mp->at(key);
    if (ep && ep->count(key)) spec = &ep->at(key);
    if (!spec) {
      diag.push_back("unknown key '" + key + "'" +
                     (c.model.empty() || c.experiment.empty()
                          ? std::string()
                          : " for model '" + c.model + "' and experiment '" + c.experiment + "'"));
      continue;
    }
    check_value(key, value, *spec, diag);
    c.params[key] = value;
  }
  if (mp) {
    for (const auto& [key, spec] : *mp) {
      if (spec.required && !doc.contains(key)) diag.push_back(key + ": required for model '" + c.model + "'");
    }
  }
  if (c.params.contains("mode") && c.params["mode"].is_string()) {
    const auto m = c.params["mode"].get<std::string>();
    if (m != "exact" && m != "mc") diag.push_back("mode: expected \"exact\" or \"mc\"");
  }
  if (!c.model.empty() && !c.experiment.empty() && !contains(allowed_models().at(c.experiment), c.model)) {
    diag.push_back("experiment '" + c.experiment + "' is not available for model '" + c.model +
                   "' (supported: " + join(allowed_models().at(c.experiment)) + ")");
  }

  if (ov.seed) c.seed = *ov.seed;
  if (ov.replicas) {
    if (*ov.replicas == 0) diag.push_back("--replicas: expected positive integer");
    c.replicas = *ov.replicas;
  }
  if (ov.threads) c.threads = *ov.threads;
  if (ov.out) c.out = *ov.out;

  if (!diag.empty()) throw ConfigError(std::move(diag));
  fill_defaults(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  // A relative kernel_file is relative to the config file.
  if (doc.is_object() && doc.contains("kernel_file") && doc["kernel_file"].is_string()) {
    const std::filesystem::path k = doc["kernel_file"].get<std::string>();
    if (k.is_relative()) doc["kernel_file"] = (std::filesystem::path(path).parent_path() / k).lexically_normal().string();
  }
  return parse_config(doc, overrides);
}

}  // namespace mixlab::lab
