#include <iostream>

#include <CLI11.hpp>

#include "mixlab/budget.hpp"
#include "mixlab/lab.hpp"

namespace lab = mixlab::lab;

namespace {

struct Flags {
  std::string config;
  lab::Overrides ov;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "experiment configuration (JSON)")->required();
  cmd->add_option("--seed", f.ov.seed, "master seed (u64)");
  cmd->add_option("--replicas", f.ov.replicas, "Monte Carlo replicas");
  cmd->add_option("--threads", f.ov.threads, "worker cap; results do not depend on it (0 = all cores)");
  cmd->add_option("--out", f.ov.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixlab: mixing, coupling and concentration experiments on Markov chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lab::artifact_version());

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "run the experiment named in the config"},
      {"mix", "exact distance-to-stationarity curve and mixing time"},
      {"conc", "empirical tail of a Lipschitz observable against a tail bound"},
      {"profile", "Wasserstein contraction profile over adjacent pairs"},
      {"ode", "supermarket fluid limit against its fixed point"},
      {"maxq", "supermarket maximum queue length histogram"},
      {"chaos", "supermarket chaoticity estimate for r queues"},
      {"cutoff", "Curie-Weiss cut-off scan around t_n"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (sub != "run") flags.ov.experiment = sub;
  try {
    const auto cfg = lab::load_config(flags.config, flags.ov);
    const auto report = lab::run(cfg);
    lab::write_report(report, cfg.out);
    std::cout << cfg.experiment << " (" << cfg.model << "): " << (report.consistent ? "consistent" : "inconsistent")
              << "; " << report.tables.size() << " table(s) and report.json written to " << cfg.out << '\n';
    return lab::exit_code(report);
  } catch (const lab::ConfigError& e) {
    std::cerr << "error: invalid configuration\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << '\n';
    return 1;
  } catch (const lab::Refused& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const mixlab::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << " (raise MIXLAB_CAP_STEPS to allow it)\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
