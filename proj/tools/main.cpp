#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikecls/experiments.hpp"

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string seed;
  std::string out_dir;
  std::string threads;
  std::vector<std::string> sets;
};

spikecls::ExperimentConfig build_config(const GlobalOptions& g) {
  std::map<std::string, std::string> overrides;
  for (const auto& kv : g.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw spikecls::ConfigError("--set needs key=value, got: " + kv);
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (!g.seed.empty()) overrides["seed"] = g.seed;
  if (!g.out_dir.empty()) overrides["out_dir"] = g.out_dir;
  if (!g.threads.empty()) overrides["threads"] = g.threads;
  return spikecls::load_config(g.config_path, overrides);
}

void add_globals(CLI::App* app, GlobalOptions& g) {
  app->add_option("--config", g.config_path, "Config file (key = value lines)");
  app->add_option("--seed", g.seed, "Master seed (overrides config)");
  app->add_option("--out-dir", g.out_dir, "Output directory (overrides config)");
  app->add_option("--threads", g.threads, "Worker threads; 0 = hardware");
  app->add_option("--set", g.sets, "Override any config key, e.g. --set n_test=500");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike-train classification toolkit: optimal Bayes and kernel "
               "plug-in rules for temporal point processes"};
  app.require_subcommand(1);
  app.fallthrough(true);  // accept global flags after the subcommand too

  GlobalOptions g;
  add_globals(&app, g);

  auto* cmd_simulate =
      app.add_subcommand("simulate", "Generate a labeled spike-train dataset CSV");
  auto* cmd_bayes = app.add_subcommand(
      "bayes-risk", "Monte Carlo Bayes risk plus the theoretical bound table");
  auto* cmd_plugin = app.add_subcommand(
      "plugin-risk", "Plug-in kernel classifier risk over the L grid");
  auto* cmd_scan = app.add_subcommand(
      "bandwidth-scan", "Cross-validated bandwidth trace for both classes");
  auto* cmd_figure =
      app.add_subcommand("figure", "Reproduce a figure as a CSV artifact");
  std::string figure_id;
  cmd_figure->add_option("id", figure_id, "One of: bayes-risk-vs-T, risk-vs-T-by-L, "
                         "bandwidth-vs-T, risk-vs-L-by-phi, gaussian-failure")
      ->required();
  auto* cmd_validate =
      app.add_subcommand("validate", "Run the cross-module oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const spikecls::ExperimentConfig config = build_config(g);
    if (cmd_simulate->parsed()) {
      std::cout << spikecls::run_simulate_command(config) << "\n";
    } else if (cmd_bayes->parsed()) {
      std::cout << spikecls::run_bayes_risk_command(config) << "\n";
    } else if (cmd_plugin->parsed()) {
      std::cout << spikecls::run_plugin_risk_command(config) << "\n";
    } else if (cmd_scan->parsed()) {
      std::cout << spikecls::run_bandwidth_scan_command(config) << "\n";
    } else if (cmd_figure->parsed()) {
      std::cout << spikecls::figure(figure_id, config) << "\n";
    } else if (cmd_validate->parsed()) {
      const auto checks = spikecls::validate(config);
      for (const auto& c : checks)
        std::cout << "[" << c.status << "] " << c.name << ": " << c.detail << "\n";
      if (!spikecls::validation_passed(checks)) {
        std::cout << "validation: FAIL\n";
        return 1;
      }
      std::cout << "validation: PASS\n";
    }
  } catch (const spikecls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
