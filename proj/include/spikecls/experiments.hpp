#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spikecls/bayes.hpp"
#include "spikecls/kernel.hpp"
#include "spikecls/plugin.hpp"

namespace spikecls {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration; see README for the key list. Defaults mirror
// the standard protocol: Gaussian kernel, 10-point log bandwidth grid on
// [0.1, 10], 5 folds, n_test = 10^4, runs = 10, harmonic phase pair
// (pi/16, pi/4) with equal priors.
struct ExperimentConfig {
  IntensityModel lambda1 = IntensityModel::harmonic(0.0);
  IntensityModel lambda2 = IntensityModel::harmonic(0.0);
  double pi1 = 0.5;
  double pi2 = 0.5;
  double T = 10.0;
  std::vector<double> T_grid;
  int L = 200;
  std::vector<int> L_grid;
  KernelFamily kernel = KernelFamily::gaussian;
  std::vector<double> h_grid;
  int folds = 5;
  int n_test = 10000;
  int runs = 10;
  std::uint64_t seed = 20250810;
  std::string out_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
  std::vector<std::pair<double, double>> phase_pairs;

  std::set<std::string> explicit_keys;
  std::string config_id;  // FNV-1a hash of the canonical form, hex

  bool was_set(const std::string& key) const {
    return explicit_keys.count(key) > 0;
  }
};

// Value parser accepting plain floats and pi expressions: "pi", "pi/16",
// "3*pi/4", "-pi".
double parse_real(const std::string& text);
// Lists: "2,4,6.5", ranges "a:b:step" (inclusive), "log:lo:hi:n".
std::vector<double> parse_real_list(const std::string& text);

ExperimentConfig default_config();
// Unknown keys and malformed values throw ConfigError naming the key.
ExperimentConfig parse_config(const std::map<std::string, std::string>& kv);
// Reads "key = value" lines ('#' comments); overrides are applied on top.
ExperimentConfig load_config(const std::string& path,
                             const std::map<std::string, std::string>& overrides);

// Canonical text of everything that affects results (excludes out_dir and
// threads) and its hash.
std::string canonical_config(const ExperimentConfig& config);
std::uint64_t fnv1a_hash(const std::string& text);

inline const char* const kFigureIds[] = {
    "bayes-risk-vs-T", "risk-vs-T-by-L", "bandwidth-vs-T", "risk-vs-L-by-phi",
    "gaussian-failure"};

// Writes the figure's CSV artifact into config.out_dir and returns its path.
// Re-running with an identical config yields byte-identical output for any
// thread count.
std::string figure(const std::string& id, const ExperimentConfig& config);

struct ValidationCheck {
  std::string name;
  std::string status;  // pass | warn | fail
  std::string detail;
};

// Cross-module oracle suite at desk scale; writes validate_report.csv under
// config.out_dir.
std::vector<ValidationCheck> validate(const ExperimentConfig& config);
bool validation_passed(const std::vector<ValidationCheck>& checks);

// Command helpers shared by the CLI.
std::string run_simulate_command(const ExperimentConfig& config);
std::string run_bayes_risk_command(const ExperimentConfig& config);
std::string run_plugin_risk_command(const ExperimentConfig& config);
std::string run_bandwidth_scan_command(const ExperimentConfig& config);

}  // namespace spikecls
