#include "spikecls/plugin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "spikecls/parallel.hpp"
#include "spikecls/rng.hpp"

namespace spikecls {

namespace {

constexpr double kDensityClip = 1e-12;
constexpr std::uint64_t kStreamPluginTrainSet = 0x30;
constexpr std::uint64_t kStreamPluginTestLabel = 0x31;
constexpr std::uint64_t kStreamPluginTestTrain = 0x32;
constexpr std::uint64_t kStreamPluginCv = 0x33;

}  // namespace

PluginClassifier PluginClassifier::from_estimate(const KernelShapeEstimate& estimate) {
  if (!(estimate.tau1_hat > 0.0) || !(estimate.tau2_hat > 0.0))
    throw std::domain_error(
        "PluginClassifier: a class never fired in training (tau_hat = 0)");
  PluginClassifier c;
  c.p1_hat = [shape = estimate.p1](double t) { return shape.density(t); };
  c.p2_hat = [shape = estimate.p2](double t) { return shape.density(t); };
  c.tau1_hat = estimate.tau1_hat;
  c.tau2_hat = estimate.tau2_hat;
  c.log_count_ratio = std::log(static_cast<double>(estimate.L2) /
                               static_cast<double>(estimate.L1));
  c.window_T = estimate.window_T;
  return c;
}

PluginClassifier PluginClassifier::from_truth(const BayesRule& rule) {
  PluginClassifier c;
  c.p1_hat = [rule](double t) { return rule.shape1(t); };
  c.p2_hat = [rule](double t) { return rule.shape2(t); };
  c.tau1_hat = rule.tau1;
  c.tau2_hat = rule.tau2;
  c.log_count_ratio = rule.log_prior_ratio;
  c.window_T = rule.window_T;
  return c;
}

PluginDecisionStatistic plugin_statistic(const PluginClassifier& classifier,
                                         const SpikeTrain& x) {
  if (x.window_T != classifier.window_T)
    throw std::invalid_argument("classify: train window differs from classifier");
  PluginDecisionStatistic out;
  for (double t : x.times) {
    const double p1 = std::max(classifier.p1_hat(t), kDensityClip);
    const double p2 = std::max(classifier.p2_hat(t), kDensityClip);
    out.W_hat += std::log(p1 / p2);
  }
  out.eta_hat = classifier.tau1_hat - classifier.tau2_hat +
                x.count() * std::log(classifier.tau2_hat / classifier.tau1_hat) +
                classifier.log_count_ratio;
  return out;
}

ClassLabel classify(const PluginClassifier& classifier, const SpikeTrain& x) {
  const PluginDecisionStatistic s = plugin_statistic(classifier, x);
  return s.W_hat >= s.eta_hat ? ClassLabel::omega1 : ClassLabel::omega2;
}

PairedRiskReport estimate_plugin_risk(const IntensityModel& lambda1,
                                      const IntensityModel& lambda2, double pi1,
                                      double pi2, int L, double T,
                                      KernelFamily family,
                                      const std::vector<double>& h_grid,
                                      int folds, int n_test, int runs,
                                      std::uint64_t seed, int threads) {
  if (n_test < 1 || runs < 1)
    throw std::invalid_argument("estimate_plugin_risk: n_test and runs must be >= 1");
  const BayesRule rule = make_bayes_rule(lambda1, lambda2, pi1, pi2, T);
  const PoissonSampler sampler1(lambda1, T);
  const PoissonSampler sampler2(lambda2, T);
  const int n_threads = resolve_threads(threads);

  PairedRiskReport report;
  report.plugin.n_test = report.bayes.n_test = n_test;
  report.plugin.runs = report.bayes.runs = runs;
  report.plugin.seed = report.bayes.seed = seed;
  report.plugin.run_risks.resize(static_cast<std::size_t>(runs));
  report.bayes.run_risks.resize(static_cast<std::size_t>(runs));
  report.h1_per_run.resize(static_cast<std::size_t>(runs));
  report.h2_per_run.resize(static_cast<std::size_t>(runs));

  for (int r = 0; r < runs; ++r) {
    const TrainingSet training = generate_training_set(
        lambda1, lambda2, pi1, pi2, L, T,
        derive_seed(seed, kStreamPluginTrainSet, static_cast<std::uint64_t>(r)),
        n_threads);
    const int L1 = training.count_class(ClassLabel::omega1);
    const int L2 = training.count_class(ClassLabel::omega2);
    if (L1 < 2 || L2 < 2)
      throw std::domain_error(
          "estimate_plugin_risk: a training class has fewer than 2 samples");
    // Small classes cannot honour the requested fold count; shrink it so the
    // partition stays valid.
    const int folds_eff = std::min(folds, std::min(L1, L2));

    const std::uint64_t cv_seed =
        derive_seed(seed, kStreamPluginCv, static_cast<std::uint64_t>(r));
    const double h1 = select_bandwidth_cv(training, ClassLabel::omega1, family,
                                          h_grid, folds_eff, cv_seed, nullptr,
                                          n_threads);
    const double h2 = select_bandwidth_cv(training, ClassLabel::omega2, family,
                                          h_grid, folds_eff, cv_seed, nullptr,
                                          n_threads);
    report.h1_per_run[static_cast<std::size_t>(r)] = h1;
    report.h2_per_run[static_cast<std::size_t>(r)] = h2;

    const KernelShapeEstimate estimate = fit(training, family, h1, h2);
    const PluginClassifier classifier = PluginClassifier::from_estimate(estimate);

    std::atomic<int> plugin_errors{0};
    std::atomic<int> bayes_errors{0};
    parallel_for(n_test, n_threads, [&](std::int64_t i) {
      const std::uint64_t idx =
          static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n_test) +
          static_cast<std::uint64_t>(i);
      Rng label_rng(derive_seed(seed, kStreamPluginTestLabel, idx));
      const ClassLabel label =
          label_rng.uniform() < pi1 ? ClassLabel::omega1 : ClassLabel::omega2;
      const PoissonSampler& sampler =
          label == ClassLabel::omega1 ? sampler1 : sampler2;
      const SpikeTrain train =
          sampler.draw(derive_seed(seed, kStreamPluginTestTrain, idx));
      if (classify(classifier, train) != label)
        plugin_errors.fetch_add(1, std::memory_order_relaxed);
      if (decide(rule, train) != label)
        bayes_errors.fetch_add(1, std::memory_order_relaxed);
    });
    report.plugin.run_risks[static_cast<std::size_t>(r)] =
        static_cast<double>(plugin_errors.load()) / n_test;
    report.bayes.run_risks[static_cast<std::size_t>(r)] =
        static_cast<double>(bayes_errors.load()) / n_test;
  }

  auto finish = [n_test, runs](RiskReport& rr) {
    rr.mean = mean_of(rr.run_risks);
    rr.std_error = runs >= 2
                       ? std_error_of_mean(rr.run_risks)
                       : std::sqrt(std::max(rr.mean * (1.0 - rr.mean), 0.0) /
                                   n_test);
  };
  finish(report.plugin);
  finish(report.bayes);
  return report;
}

}  // namespace spikecls
