#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace spikecls {

// Rates below this floor are treated as zero when checking the positivity
// assumption on intensities and shape densities.
inline constexpr double kRateFloor = 1e-12;

enum class IntensityKind { homogeneous, harmonic, gaussian_bump, scaled, tabulated };

// Deterministic event-rate function lambda(t) >= 0 on [0, inf).
// Immutable after construction; safe to share across threads.
class IntensityModel {
 public:
  // Defaults to the zero rate.
  IntensityModel() = default;

  // lambda(t) = rate
  static IntensityModel homogeneous(double rate);
  // lambda(t) = 1.6 + cos(pi/(4*sqrt(3))*t + phase)
  //           + 0.5*cos(pi/(3*sqrt(2))*t + pi/4 + phase)
  static IntensityModel harmonic(double phase);
  // lambda(t) = amplitude * exp(-width*(t - 0.5)^2)
  static IntensityModel gaussian_bump(double amplitude, double width);
  // lambda(t) = factor * base(t)
  static IntensityModel scaled(IntensityModel base, double factor);
  // Piecewise-linear interpolation through (t, rate) nodes; constant
  // extrapolation outside the node range.
  static IntensityModel tabulated(std::vector<double> t, std::vector<double> rate);
  // Two-column CSV (t, lambda) with a header row.
  static IntensityModel tabulated_from_csv(const std::string& path);

  IntensityKind kind() const { return kind_; }
  double eval(double t) const;

  // Integral of the rate over [a, b]; closed form where the variant has one,
  // otherwise adaptive Simpson (abs tol 1e-10, max depth 50).
  double integrate(double a, double b) const;
  // Always the quadrature route, for cross-checking the closed forms.
  double integrate_quadrature(double a, double b) const;
  bool has_closed_form_integral() const;

  // Exact upper bound for the rate on [0, T] (envelope, not a grid scan).
  double sup_bound(double T) const;

  // Parameter accessors; only meaningful for the matching kind.
  double rate() const { return p0_; }
  double phase() const { return p0_; }
  double amplitude() const { return p0_; }
  double width() const { return p1_; }
  double factor() const { return p1_; }
  const IntensityModel& base() const { return *base_; }
  const std::vector<std::pair<double, double>>& table() const { return *table_; }

  std::string describe() const;

 private:
  IntensityKind kind_ = IntensityKind::homogeneous;
  double p0_ = 0.0;
  double p1_ = 0.0;
  std::shared_ptr<const IntensityModel> base_;
  std::shared_ptr<const std::vector<std::pair<double, double>>> table_;
};

// lambda(t) = tau * shape(t) with shape a probability density on [0, T].
struct ShapeDecomposition {
  IntensityModel model;
  double tau = 0.0;
  double window_T = 0.0;

  double shape(double t) const { return model.eval(t) / tau; }
};

ShapeDecomposition shape_decompose(const IntensityModel& model, double T);

// K_T(p||q) = int_0^T log(p/q) p dt. Both shapes must stay above kRateFloor
// on the window; violations are rejected rather than clipped.
double kl_divergence(const ShapeDecomposition& p, const ShapeDecomposition& q);
// V_T(p||q) = int_0^T log^2(p/q) p dt, same guards.
double kl_variation(const ShapeDecomposition& p, const ShapeDecomposition& q);

// beta(T) = int_0^T [lambda1/2 + lambda2/2 - sqrt(lambda1*lambda2)] dt >= 0.
double bhattacharyya_exponent(const IntensityModel& lambda1,
                              const IntensityModel& lambda2, double T);
// sqrt(pi1*pi2) * exp(-beta)
double bhattacharyya_bound(double exponent, double pi1, double pi2);

struct IntensityBounds {
  double delta = 0.0;   // grid minimum of the rate on [0, T]
  double C = 0.0;       // grid maximum
  double d_hat = 0.0;   // (1/T) * int_0^T lambda
  bool a1_violated = false;
};

IntensityBounds verify_bounds(const IntensityModel& model, double T,
                              int grid_points = 100000);
IntensityBounds combine_bounds(const IntensityBounds& b1, const IntensityBounds& b2);

}  // namespace spikecls
