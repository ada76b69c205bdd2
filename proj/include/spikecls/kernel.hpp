#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spikecls/simulate.hpp"

namespace spikecls {

enum class KernelFamily { epanechnikov, gaussian };

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double bandwidth = 1.0;
};

// K(u): Epanechnikov 3/4 (1 - u^2) on [-1, 1], or the standard normal density.
double kernel_value(KernelFamily family, double u);
// int K^2: 3/5 for Epanechnikov, 1/(2 sqrt(pi)) for Gaussian.
double kernel_sq_integral(KernelFamily family);
// int_{-inf}^{u} K
double kernel_mass_below(KernelFamily family, double u);
// Evaluation window half-width in bandwidth units. Exact support for
// Epanechnikov; 12 sigma for the Gaussian, whose tail beyond that is under
// 1e-31 and cannot move any statistic at the tolerances used here.
double kernel_cutoff_radius(KernelFamily family);

// lambda_hat(t) = sum_l K_h(t - t_l) from one train (Poisson rate scale).
double single_intensity_estimate(const SpikeTrain& x, const KernelSpec& spec,
                                 double t);

// Flattened event times with aggregation weights 1/(n_samples * N_j); sorted
// by time. Shared between bandwidths since the events do not depend on h.
struct ShapeEvents {
  std::vector<double> times;
  std::vector<double> weights;
  int n_samples = 0;
};

std::shared_ptr<const ShapeEvents> collect_shape_events(
    const std::vector<const SpikeTrain*>& samples);

// Equal event weights 1/n_samples: evaluating these through AggregatedShape
// gives the aggregated intensity estimate (mean of single-sample kernel
// rates) rather than the shape density.
std::shared_ptr<const ShapeEvents> collect_intensity_events(
    const std::vector<const SpikeTrain*>& samples);

// Aggregated shape-density estimate: mean of single-sample kernel densities,
// with empty trains contributing the zero function but counting in the mean.
class AggregatedShape {
 public:
  AggregatedShape() = default;
  AggregatedShape(std::shared_ptr<const ShapeEvents> events, KernelSpec spec,
                  double window_T);

  double density(double t) const;
  double integral(double a, double b) const;  // closed form via the kernel CDF
  const KernelSpec& spec() const { return spec_; }
  double window() const { return window_T_; }
  bool has_events() const { return events_ && !events_->times.empty(); }

 private:
  std::shared_ptr<const ShapeEvents> events_;
  KernelSpec spec_;
  double window_T_ = 0.0;
};

struct KernelShapeEstimate {
  AggregatedShape p1;
  AggregatedShape p2;
  double tau1_hat = 0.0;
  double tau2_hat = 0.0;
  int L1 = 0;
  int L2 = 0;
  double window_T = 0.0;
};

KernelShapeEstimate fit(const TrainingSet& data, KernelFamily family, double h1,
                        double h2);

// Exact mean of the aggregated intensity estimate at t: the kernel-smoothed
// rate int_0^T K_h(t - s) lambda(s) ds.
double expected_estimate(const IntensityModel& model, const KernelSpec& spec,
                         double t, double window_T);
// Exact variance with L aggregated samples:
// (1/(L h)) int_0^T h^{-1} K^2((t - s)/h) lambda(s) ds.
double variance_estimate(const IntensityModel& model, const KernelSpec& spec,
                         double t, double window_T, int L);

// Ten evenly log-spaced points on [0.1, 10].
std::vector<double> default_bandwidth_grid();

struct CvTraceRow {
  double h = 0.0;
  int fold = 0;
  double log_likelihood = 0.0;
};

// Held-out log-likelihood bandwidth selection for one class. Samples are
// shuffled with the seed and assigned to folds round-robin; densities below
// 1e-300 are clipped before the log, and a grid point is disqualified only
// when every held-out event in every fold hit the clip.
double select_bandwidth_cv(const TrainingSet& data, ClassLabel label,
                           KernelFamily family, std::vector<double> grid,
                           int folds, std::uint64_t seed,
                           std::vector<CvTraceRow>* trace = nullptr,
                           int threads = 1);

// Plot-ready export: rows (class, t, p_hat, tau_hat, h) on a uniform grid.
void export_estimate_csv(const KernelShapeEstimate& estimate,
                         const std::string& path, int grid_points = 201);

}  // namespace spikecls
