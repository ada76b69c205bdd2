#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spikecls/bayes.hpp"
#include "spikecls/kernel.hpp"

namespace spikecls {

// Empirical counterpart of the Bayes rule: shape densities, intensity factors
// and priors replaced by training-set estimates.
struct PluginClassifier {
  std::function<double(double)> p1_hat;
  std::function<double(double)> p2_hat;
  double tau1_hat = 0.0;
  double tau2_hat = 0.0;
  double log_count_ratio = 0.0;  // log(L2/L1)
  double window_T = 0.0;

  static PluginClassifier from_estimate(const KernelShapeEstimate& estimate);
  // Truth-backed classifier (exact shapes, factors, priors); with these
  // inputs the decisions coincide with the Bayes rule.
  static PluginClassifier from_truth(const BayesRule& rule);
};

// omega1 iff sum_i log(p1_hat(t_i)/p2_hat(t_i)) >= tau1_hat - tau2_hat
//   + N log(tau2_hat/tau1_hat) + log(L2/L1), with both densities clipped
// below at 1e-12 before the ratio. Ties go to omega1.
ClassLabel classify(const PluginClassifier& classifier, const SpikeTrain& x);

struct PluginDecisionStatistic {
  double W_hat = 0.0;
  double eta_hat = 0.0;
};

PluginDecisionStatistic plugin_statistic(const PluginClassifier& classifier,
                                         const SpikeTrain& x);

// One plug-in experiment: per run a fresh training set, CV bandwidths, fit,
// and n_test fresh labeled test trains evaluated by both the plug-in rule and
// the Bayes rule on the same draws.
struct PairedRiskReport {
  RiskReport plugin;
  RiskReport bayes;
  std::vector<double> h1_per_run;
  std::vector<double> h2_per_run;
};

PairedRiskReport estimate_plugin_risk(const IntensityModel& lambda1,
                                      const IntensityModel& lambda2, double pi1,
                                      double pi2, int L, double T,
                                      KernelFamily family,
                                      const std::vector<double>& h_grid,
                                      int folds, int n_test, int runs,
                                      std::uint64_t seed, int threads = 1);

}  // namespace spikecls
