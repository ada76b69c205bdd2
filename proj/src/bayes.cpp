#include "spikecls/bayes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "spikecls/csv.hpp"
#include "spikecls/parallel.hpp"
#include "spikecls/quadrature.hpp"
#include "spikecls/rng.hpp"

namespace spikecls {

namespace {

constexpr std::uint64_t kStreamRiskLabel = 0x10;
constexpr std::uint64_t kStreamRiskTrain = 0x11;
constexpr std::uint64_t kStreamLln = 0x12;

void check_window(const BayesRule& rule, const SpikeTrain& x) {
  if (x.window_T != rule.window_T)
    throw std::invalid_argument("decide: train window differs from rule window");
}

double positive_rate(const IntensityModel& m, double t) {
  const double v = m.eval(t);
  if (v <= 0.0)
    throw std::domain_error("decide: zero intensity at an event time");
  return v;
}

// sum_i log(lambda1(t_i)/lambda2(t_i))
double log_ratio_sum(const BayesRule& rule, const SpikeTrain& x) {
  double s = 0.0;
  for (double t : x.times)
    s += std::log(positive_rate(rule.lambda1, t) / positive_rate(rule.lambda2, t));
  return s;
}

}  // namespace

BayesRule make_bayes_rule(IntensityModel lambda1, IntensityModel lambda2,
                          double pi1, double pi2, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("make_bayes_rule: T must be > 0");
  if (!(pi1 > 0.0) || !(pi2 > 0.0) || std::abs(pi1 + pi2 - 1.0) > 1e-12)
    throw std::invalid_argument("make_bayes_rule: priors must be positive and sum to 1");
  BayesRule rule;
  rule.lambda1 = std::move(lambda1);
  rule.lambda2 = std::move(lambda2);
  rule.pi1 = pi1;
  rule.pi2 = pi2;
  rule.window_T = T;
  rule.tau1 = rule.lambda1.integrate(0.0, T);
  rule.tau2 = rule.lambda2.integrate(0.0, T);
  if (!(rule.tau1 > 0.0) || !(rule.tau2 > 0.0))
    throw std::domain_error("make_bayes_rule: class with zero expected count");
  rule.log_prior_ratio = std::log(pi2 / pi1);
  rule.gamma = (rule.tau1 - rule.tau2) + rule.log_prior_ratio;
  return rule;
}

ClassLabel decide(const BayesRule& rule, const SpikeTrain& x) {
  check_window(rule, x);
  return log_ratio_sum(rule, x) >= rule.gamma ? ClassLabel::omega1
                                              : ClassLabel::omega2;
}

ClassLabel decide_product_form(const BayesRule& rule, const SpikeTrain& x) {
  check_window(rule, x);
  double log_lr = rule.tau2 - rule.tau1;
  for (double t : x.times)
    log_lr += std::log(positive_rate(rule.lambda1, t)) -
              std::log(positive_rate(rule.lambda2, t));
  return log_lr >= rule.log_prior_ratio ? ClassLabel::omega1
                                        : ClassLabel::omega2;
}

ClassLabel decide_shape_form(const BayesRule& rule, const SpikeTrain& x) {
  const DecisionStatistic s = decision_statistic(rule, x);
  return s.W >= s.eta ? ClassLabel::omega1 : ClassLabel::omega2;
}

double product_likelihood_ratio(const BayesRule& rule, const SpikeTrain& x) {
  check_window(rule, x);
  double log_lr = rule.tau2 - rule.tau1;
  for (double t : x.times)
    log_lr += std::log(positive_rate(rule.lambda1, t) /
                       positive_rate(rule.lambda2, t));
  return std::exp(std::clamp(log_lr, -700.0, 700.0));
}

DecisionStatistic decision_statistic(const BayesRule& rule, const SpikeTrain& x) {
  check_window(rule, x);
  DecisionStatistic out;
  for (double t : x.times) {
    const double p1 = positive_rate(rule.lambda1, t) / rule.tau1;
    const double p2 = positive_rate(rule.lambda2, t) / rule.tau2;
    out.W += std::log(p1 / p2);
  }
  out.eta = rule.tau1 - rule.tau2 +
            x.count() * std::log(rule.tau2 / rule.tau1) + rule.log_prior_ratio;
  return out;
}

namespace {

struct ClassQuantities {
  double tau_own, tau_other;
  double kl;  // K_T(p_own || p_other)
  double var_u;
};

ClassTheory build_class_theory(const ClassQuantities& q, double T, double kappa,
                               double u, bool own_is_class1) {
  ClassTheory out;
  const double tau1 = own_is_class1 ? q.tau_own : q.tau_other;
  const double tau2 = own_is_class1 ? q.tau_other : q.tau_own;
  const double diff_sq = (tau1 - tau2) * (tau1 - tau2);

  double alpha;
  if (own_is_class1) {
    alpha = tau1 - tau2 + tau1 * std::log(tau2 / tau1) - tau1 * q.kl;
    out.lemma1_lower = -diff_sq / tau2 - tau1 * q.kl;
    out.lemma1_upper = -tau1 * q.kl;
  } else {
    alpha = tau1 - tau2 + tau2 * std::log(tau2 / tau1) + tau2 * q.kl;
    out.lemma1_lower = tau2 * q.kl;
    out.lemma1_upper = diff_sq / tau1 + tau2 * q.kl;
  }
  out.alpha_T = alpha;
  if (alpha < *out.lemma1_lower - 1e-8 || alpha > *out.lemma1_upper + 1e-8)
    throw std::logic_error("theoretical_report: Lemma 1 sandwich violated");

  out.var_U = q.var_u;
  const double theta = q.var_u / T;
  out.theta_T = theta;

  // The misclassification threshold is (alpha + kappa)/T; the Chebyshev and
  // exponential bounds need it on the error side of zero.
  const double signed_eps = (alpha + kappa) / T;
  const double eps = own_is_class1 ? -signed_eps : signed_eps;
  out.epsilon_T = std::abs(signed_eps);
  if (eps > 0.0) {
    if (theta > 0.0) out.chebyshev_coeff = theta / (eps * eps);
    const double denom = 2.0 * theta + u * eps;
    if (denom > 0.0) out.exp_rate = eps * eps / denom;
  }
  return out;
}

}  // namespace

TheoreticalRiskReport theoretical_report(const BayesRule& rule,
                                         const IntensityBounds& bounds,
                                         double d) {
  TheoreticalRiskReport report;
  report.bhatt_exponent =
      bhattacharyya_exponent(rule.lambda1, rule.lambda2, rule.window_T);
  report.bhatt_bound =
      bhattacharyya_bound(report.bhatt_exponent, rule.pi1, rule.pi2);
  report.a1_ok = !bounds.a1_violated && bounds.delta >= kRateFloor;
  if (!report.a1_ok) return report;

  const double T = rule.window_T;
  const double kappa = rule.log_prior_ratio;
  const double u = std::log(bounds.C / bounds.delta);

  const auto p1 = shape_decompose(rule.lambda1, T);
  const auto p2 = shape_decompose(rule.lambda2, T);
  const double k12 = kl_divergence(p1, p2);
  const double k21 = kl_divergence(p2, p1);

  auto g = [&](double t) {
    return std::log(rule.lambda1.eval(t) / rule.lambda2.eval(t));
  };
  const double var1 = integrate_adaptive(
      [&](double t) { const double v = g(t); return v * v * rule.lambda1.eval(t); },
      0.0, T);
  const double var2 = integrate_adaptive(
      [&](double t) { const double v = g(t); return v * v * rule.lambda2.eval(t); },
      0.0, T);

  report.class1 = build_class_theory({rule.tau1, rule.tau2, k12, var1}, T,
                                     kappa, u, true);
  report.class2 = build_class_theory({rule.tau2, rule.tau1, k21, var2}, T,
                                     kappa, u, false);

  if (report.class1.chebyshev_coeff && report.class2.chebyshev_coeff)
    report.chebyshev_risk_bound = (rule.pi1 * *report.class1.chebyshev_coeff +
                                   rule.pi2 * *report.class2.chebyshev_coeff) /
                                  T;
  if (report.class1.exp_rate && report.class2.exp_rate)
    report.exp_risk_bound = rule.pi1 * std::exp(-*report.class1.exp_rate * T) +
                            rule.pi2 * std::exp(-*report.class2.exp_rate * T);

  // Asymptotic constants of Remarks 1 and 2, kept in unsimplified form; the
  // squared log-ratio is identically 1.
  if (d > 0.0) {
    const double ratio_up = std::log(bounds.C / bounds.delta);
    const double ratio_dn = std::log(bounds.delta / bounds.C);
    report.c1 = (1.0 / d) * (ratio_up / ratio_dn) * (ratio_up / ratio_dn);
    report.c2 = (d / 3.0) * (ratio_dn / ratio_up) * (ratio_dn / ratio_up);
  }
  return report;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_error_of_mean(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

RiskReport estimate_bayes_risk(const BayesRule& rule, int n_test, int runs,
                               std::uint64_t seed, int threads) {
  if (n_test < 1 || runs < 1)
    throw std::invalid_argument("estimate_bayes_risk: n_test and runs must be >= 1");
  const PoissonSampler sampler1(rule.lambda1, rule.window_T);
  const PoissonSampler sampler2(rule.lambda2, rule.window_T);

  RiskReport report;
  report.n_test = n_test;
  report.runs = runs;
  report.seed = seed;
  report.run_risks.resize(static_cast<std::size_t>(runs));

  for (int r = 0; r < runs; ++r) {
    std::atomic<int> errors{0};
    parallel_for(n_test, resolve_threads(threads), [&](std::int64_t i) {
      const std::uint64_t idx =
          static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n_test) +
          static_cast<std::uint64_t>(i);
      Rng label_rng(derive_seed(seed, kStreamRiskLabel, idx));
      const ClassLabel label =
          label_rng.uniform() < rule.pi1 ? ClassLabel::omega1 : ClassLabel::omega2;
      const PoissonSampler& sampler =
          label == ClassLabel::omega1 ? sampler1 : sampler2;
      const SpikeTrain train = sampler.draw(derive_seed(seed, kStreamRiskTrain, idx));
      if (decide(rule, train) != label) errors.fetch_add(1, std::memory_order_relaxed);
    });
    report.run_risks[static_cast<std::size_t>(r)] =
        static_cast<double>(errors.load()) / n_test;
  }

  report.mean = mean_of(report.run_risks);
  report.std_error =
      runs >= 2 ? std_error_of_mean(report.run_risks)
                : std::sqrt(std::max(report.mean * (1.0 - report.mean), 0.0) /
                            n_test);
  return report;
}

std::vector<LlnRow> lln_diagnostic(const BayesRule& rule, ClassLabel label,
                                   const std::vector<double>& T_grid,
                                   std::vector<double> eps_list, int replicates,
                                   std::uint64_t seed, int threads) {
  if (T_grid.empty()) throw std::invalid_argument("lln_diagnostic: empty T grid");
  if (replicates < 1)
    throw std::invalid_argument("lln_diagnostic: replicates must be >= 1");
  const double max_T = *std::max_element(T_grid.begin(), T_grid.end());
  const IntensityBounds bounds =
      combine_bounds(verify_bounds(rule.lambda1, max_T),
                     verify_bounds(rule.lambda2, max_T));
  if (bounds.a1_violated)
    throw std::domain_error("lln_diagnostic: positivity assumption violated");
  const double u = std::log(bounds.C / bounds.delta);

  const IntensityModel& own =
      label == ClassLabel::omega1 ? rule.lambda1 : rule.lambda2;
  auto g = [&](double t) {
    return std::log(rule.lambda1.eval(t) / rule.lambda2.eval(t));
  };

  std::vector<LlnRow> rows;
  for (std::size_t ti = 0; ti < T_grid.size(); ++ti) {
    const double T = T_grid[ti];
    const double compensator =
        integrate_adaptive([&](double t) { return g(t) * own.eval(t); }, 0.0, T);
    const double var_u = integrate_adaptive(
        [&](double t) { const double v = g(t); return v * v * own.eval(t); },
        0.0, T);
    const double theta = var_u / T;

    std::vector<double> eps_here = eps_list;
    if (eps_here.empty()) {
      const BayesRule slice = make_bayes_rule(rule.lambda1, rule.lambda2,
                                              rule.pi1, rule.pi2, T);
      const auto report = theoretical_report(slice, bounds, bounds.d_hat);
      if (report.class1.epsilon_T && report.class2.epsilon_T)
        eps_here.push_back(0.5 * (*report.class1.epsilon_T +
                                  *report.class2.epsilon_T));
      else
        eps_here.push_back(0.1);
    }

    const PoissonSampler sampler(own, T);
    std::vector<double> abs_u_over_t(static_cast<std::size_t>(replicates));
    parallel_for(replicates, resolve_threads(threads), [&](std::int64_t i) {
      const std::uint64_t idx =
          static_cast<std::uint64_t>(ti) * static_cast<std::uint64_t>(replicates) +
          static_cast<std::uint64_t>(i);
      const SpikeTrain train = sampler.draw(derive_seed(seed, kStreamLln, idx));
      double sum_g = 0.0;
      for (double t : train.times) sum_g += g(t);
      abs_u_over_t[static_cast<std::size_t>(i)] = std::abs(sum_g - compensator) / T;
    });

    const double mean_abs = mean_of(abs_u_over_t);
    for (double eps : eps_here) {
      int tail = 0;
      for (double v : abs_u_over_t)
        if (v >= eps) ++tail;
      LlnRow row;
      row.T = T;
      row.eps = eps;
      row.mean_abs_u_over_t = mean_abs;
      row.tail_freq = static_cast<double>(tail) / replicates;
      row.lemma6_bound =
          2.0 * std::exp(-T * eps * eps / (2.0 * theta + u * eps));
      row.theta_T = theta;
      rows.push_back(row);
    }
  }
  return rows;
}

void append_theory_rows(CsvWriter& csv, const TheoreticalRiskReport& report,
                        double T, std::uint64_t seed) {
  const std::string t_str = fmt_double(T);
  const std::string seed_str = std::to_string(seed);
  auto emit = [&](const std::string& name, const std::optional<double>& value,
                  int cls) {
    csv.row({t_str, name, value ? fmt_double(*value) : "unavailable",
             std::to_string(cls), seed_str});
  };
  auto emit_class = [&](const ClassTheory& c, int cls) {
    emit("alpha_T", c.alpha_T, cls);
    emit("lemma1_lower", c.lemma1_lower, cls);
    emit("lemma1_upper", c.lemma1_upper, cls);
    emit("var_U", c.var_U, cls);
    emit("theta_T", c.theta_T, cls);
    emit("epsilon_T", c.epsilon_T, cls);
    emit(cls == 1 ? "a_T" : "b_T", c.chebyshev_coeff, cls);
    emit(cls == 1 ? "A_T" : "B_T", c.exp_rate, cls);
  };
  emit_class(report.class1, 1);
  emit_class(report.class2, 2);
  emit("chebyshev_risk_bound", report.chebyshev_risk_bound, 0);
  emit("exp_risk_bound", report.exp_risk_bound, 0);
  emit("c1", report.c1, 0);
  emit("c2", report.c2, 0);
  emit("bhattacharyya_exponent", report.bhatt_exponent, 0);
  emit("bhattacharyya_bound", report.bhatt_bound, 0);
  csv.row({t_str, "a1_ok", report.a1_ok ? "1" : "0", "0", seed_str});
}

void write_theory_csv(const std::string& path, const TheoreticalRiskReport& report,
                      double T, std::uint64_t seed) {
  CsvWriter csv(path);
  csv.row({"T", "quantity", "value", "class", "seed"});
  append_theory_rows(csv, report, T, seed);
  csv.close();
}

}  // namespace spikecls
