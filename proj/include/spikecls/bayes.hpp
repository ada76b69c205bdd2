#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikecls/intensity.hpp"
#include "spikecls/simulate.hpp"

namespace spikecls {

// Optimal rule for two classes with known intensities and priors.
struct BayesRule {
  IntensityModel lambda1;
  IntensityModel lambda2;
  double pi1 = 0.5;
  double pi2 = 0.5;
  double window_T = 0.0;

  // Precomputed: intensity factors, log-form threshold, prior log-ratio.
  double tau1 = 0.0;
  double tau2 = 0.0;
  double gamma = 0.0;            // (tau1 - tau2) + log(pi2/pi1)
  double log_prior_ratio = 0.0;  // log(pi2/pi1)

  double shape1(double t) const { return lambda1.eval(t) / tau1; }
  double shape2(double t) const { return lambda2.eval(t) / tau2; }
};

BayesRule make_bayes_rule(IntensityModel lambda1, IntensityModel lambda2,
                          double pi1, double pi2, double T);

// Log form: omega1 iff sum_i log(lambda1(t_i)/lambda2(t_i)) >= gamma.
// Ties go to omega1. The empty sum handles N = 0.
ClassLabel decide(const BayesRule& rule, const SpikeTrain& x);

// Same rule through the other two algebraic routes, for cross-checking.
ClassLabel decide_product_form(const BayesRule& rule, const SpikeTrain& x);
ClassLabel decide_shape_form(const BayesRule& rule, const SpikeTrain& x);

// Likelihood ratio of the product form, exp-clamped for display only; all
// internal arithmetic stays in the log domain.
double product_likelihood_ratio(const BayesRule& rule, const SpikeTrain& x);

struct DecisionStatistic {
  double W = 0.0;    // sum_i log(p1(t_i)/p2(t_i))
  double eta = 0.0;  // tau1 - tau2 + N log(tau2/tau1) + log(pi2/pi1)
};

DecisionStatistic decision_statistic(const BayesRule& rule, const SpikeTrain& x);

// Deterministic threshold/variance theory for one conditioning class.
// Bound fields that are undefined for the configuration (flat prior ratio,
// identical classes, positivity violated) stay empty.
struct ClassTheory {
  std::optional<double> alpha_T;
  std::optional<double> lemma1_lower;
  std::optional<double> lemma1_upper;
  std::optional<double> var_U;            // Var U_T
  std::optional<double> theta_T;          // Var(U_T / sqrt(T))
  std::optional<double> epsilon_T;        // |alpha_T/T + kappa/T|
  std::optional<double> chebyshev_coeff;  // a_T (class 1) or b_T (class 2)
  std::optional<double> exp_rate;         // A_T (class 1) or B_T (class 2)
};

struct TheoreticalRiskReport {
  ClassTheory class1;
  ClassTheory class2;
  std::optional<double> chebyshev_risk_bound;  // (pi1 a_T + pi2 b_T) / T
  std::optional<double> exp_risk_bound;        // pi1 e^{-A_T T} + pi2 e^{-B_T T}
  std::optional<double> c1;                    // (1/d) (log(C/d)/log(d/C))^2
  std::optional<double> c2;                    // (d/3) (log(d/C)/log(C/d))^2
  double bhatt_exponent = 0.0;
  double bhatt_bound = 0.0;
  bool a1_ok = false;
};

// bounds: combined A1 envelope of both intensities on the window; d: caller's
// average-rate constant (typically d_hat from verify_bounds).
TheoreticalRiskReport theoretical_report(const BayesRule& rule,
                                         const IntensityBounds& bounds, double d);

struct RiskReport {
  std::vector<double> run_risks;
  double mean = 0.0;
  double std_error = 0.0;  // across runs; binomial if runs == 1
  int n_test = 0;
  int runs = 0;
  std::uint64_t seed = 0;
};

double mean_of(const std::vector<double>& v);
double std_error_of_mean(const std::vector<double>& v);

RiskReport estimate_bayes_risk(const BayesRule& rule, int n_test, int runs,
                               std::uint64_t seed, int threads = 1);

struct LlnRow {
  double T = 0.0;
  double eps = 0.0;
  double mean_abs_u_over_t = 0.0;
  double tail_freq = 0.0;
  double lemma6_bound = 0.0;
  double theta_T = 0.0;
};

// Monte Carlo law-of-large-numbers diagnostic for U_T/T under one class.
// With an empty eps list, each T uses the midpoint of the two per-class
// |alpha_T/T + kappa/T| values.
std::vector<LlnRow> lln_diagnostic(const BayesRule& rule, ClassLabel label,
                                   const std::vector<double>& T_grid,
                                   std::vector<double> eps_list, int replicates,
                                   std::uint64_t seed, int threads = 1);

class CsvWriter;

// Rows (T, quantity, value, class, seed); pair-level quantities use class 0.
void append_theory_rows(CsvWriter& csv, const TheoreticalRiskReport& report,
                        double T, std::uint64_t seed);
void write_theory_csv(const std::string& path, const TheoreticalRiskReport& report,
                      double T, std::uint64_t seed);

}  // namespace spikecls
