#include "spikecls/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "spikecls/csv.hpp"
#include "spikecls/parallel.hpp"
#include "spikecls/quadrature.hpp"
#include "spikecls/rng.hpp"

namespace spikecls {

namespace {

constexpr double kCvDensityFloor = 1e-300;
constexpr std::uint64_t kStreamCvShuffle = 0x20;

const double kGaussNorm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void check_bandwidth(const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0))
    throw std::invalid_argument("kernel: bandwidth must be > 0");
}

}  // namespace

double kernel_value(KernelFamily family, double u) {
  switch (family) {
    case KernelFamily::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::gaussian:
      return kGaussNorm * std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double kernel_sq_integral(KernelFamily family) {
  switch (family) {
    case KernelFamily::epanechnikov:
      return 0.6;
    case KernelFamily::gaussian:
      return 1.0 / (2.0 * std::sqrt(std::numbers::pi));
  }
  return 0.0;
}

double kernel_mass_below(KernelFamily family, double u) {
  switch (family) {
    case KernelFamily::epanechnikov:
      if (u <= -1.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return 0.5 + 0.75 * (u - u * u * u / 3.0);
    case KernelFamily::gaussian:
      return 0.5 * std::erfc(-u / std::numbers::sqrt2);
  }
  return 0.0;
}

double kernel_cutoff_radius(KernelFamily family) {
  return family == KernelFamily::epanechnikov ? 1.0 : 12.0;
}

double single_intensity_estimate(const SpikeTrain& x, const KernelSpec& spec,
                                 double t) {
  check_bandwidth(spec);
  const double h = spec.bandwidth;
  double sum = 0.0;
  for (double ti : x.times) sum += kernel_value(spec.family, (t - ti) / h);
  return sum / h;
}

std::shared_ptr<const ShapeEvents> collect_shape_events(
    const std::vector<const SpikeTrain*>& samples) {
  auto events = std::make_shared<ShapeEvents>();
  events->n_samples = static_cast<int>(samples.size());
  std::size_t total = 0;
  for (const SpikeTrain* s : samples) total += s->times.size();
  std::vector<std::pair<double, double>> flat;
  flat.reserve(total);
  for (const SpikeTrain* s : samples) {
    if (s->times.empty()) continue;
    const double w = 1.0 / (static_cast<double>(samples.size()) *
                            static_cast<double>(s->times.size()));
    for (double t : s->times) flat.emplace_back(t, w);
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  events->times.reserve(flat.size());
  events->weights.reserve(flat.size());
  for (const auto& [t, w] : flat) {
    events->times.push_back(t);
    events->weights.push_back(w);
  }
  return events;
}

std::shared_ptr<const ShapeEvents> collect_intensity_events(
    const std::vector<const SpikeTrain*>& samples) {
  auto events = std::make_shared<ShapeEvents>();
  events->n_samples = static_cast<int>(samples.size());
  std::vector<std::pair<double, double>> flat;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const SpikeTrain* s : samples)
    for (double t : s->times) flat.emplace_back(t, w);
  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  events->times.reserve(flat.size());
  events->weights.reserve(flat.size());
  for (const auto& [t, weight] : flat) {
    events->times.push_back(t);
    events->weights.push_back(weight);
  }
  return events;
}

AggregatedShape::AggregatedShape(std::shared_ptr<const ShapeEvents> events,
                                 KernelSpec spec, double window_T)
    : events_(std::move(events)), spec_(spec), window_T_(window_T) {
  check_bandwidth(spec_);
}

double AggregatedShape::density(double t) const {
  if (!events_) return 0.0;
  const double h = spec_.bandwidth;
  const double radius = kernel_cutoff_radius(spec_.family) * h;
  const auto& times = events_->times;
  const auto lo = std::lower_bound(times.begin(), times.end(), t - radius);
  const auto hi = std::upper_bound(times.begin(), times.end(), t + radius);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    sum += events_->weights[i] * kernel_value(spec_.family, (t - *it) / h);
  }
  return sum / h;
}

double AggregatedShape::integral(double a, double b) const {
  if (!events_) return 0.0;
  const double h = spec_.bandwidth;
  double sum = 0.0;
  for (std::size_t i = 0; i < events_->times.size(); ++i) {
    const double t = events_->times[i];
    sum += events_->weights[i] * (kernel_mass_below(spec_.family, (b - t) / h) -
                                  kernel_mass_below(spec_.family, (a - t) / h));
  }
  return sum;
}

KernelShapeEstimate fit(const TrainingSet& data, KernelFamily family, double h1,
                        double h2) {
  std::vector<const SpikeTrain*> class1, class2;
  double count1 = 0.0, count2 = 0.0;
  for (const auto& s : data.samples) {
    if (s.label == ClassLabel::omega1) {
      class1.push_back(&s.train);
      count1 += s.train.count();
    } else {
      class2.push_back(&s.train);
      count2 += s.train.count();
    }
  }
  if (class1.empty() || class2.empty())
    throw std::invalid_argument("fit: each class needs at least one sample");

  KernelShapeEstimate est;
  est.L1 = static_cast<int>(class1.size());
  est.L2 = static_cast<int>(class2.size());
  est.tau1_hat = count1 / est.L1;
  est.tau2_hat = count2 / est.L2;
  est.window_T = data.window_T;
  est.p1 = AggregatedShape(collect_shape_events(class1), {family, h1},
                           data.window_T);
  est.p2 = AggregatedShape(collect_shape_events(class2), {family, h2},
                           data.window_T);
  return est;
}

double expected_estimate(const IntensityModel& model, const KernelSpec& spec,
                         double t, double window_T) {
  check_bandwidth(spec);
  const double h = spec.bandwidth;
  const double radius = kernel_cutoff_radius(spec.family) * h;
  const double a = std::max(0.0, t - radius);
  const double b = std::min(window_T, t + radius);
  if (a >= b) return 0.0;
  return integrate_adaptive(
      [&](double s) {
        return kernel_value(spec.family, (t - s) / h) / h * model.eval(s);
      },
      a, b);
}

double variance_estimate(const IntensityModel& model, const KernelSpec& spec,
                         double t, double window_T, int L) {
  check_bandwidth(spec);
  if (L < 1) throw std::invalid_argument("variance_estimate: L must be >= 1");
  const double h = spec.bandwidth;
  const double radius = kernel_cutoff_radius(spec.family) * h;
  const double a = std::max(0.0, t - radius);
  const double b = std::min(window_T, t + radius);
  if (a >= b) return 0.0;
  const double integral = integrate_adaptive(
      [&](double s) {
        const double k = kernel_value(spec.family, (t - s) / h);
        return k * k / h * model.eval(s);
      },
      a, b);
  return integral / (static_cast<double>(L) * h);
}

std::vector<double> default_bandwidth_grid() {
  std::vector<double> grid(10);
  for (int k = 0; k < 10; ++k)
    grid[static_cast<std::size_t>(k)] = std::pow(10.0, -1.0 + 2.0 * k / 9.0);
  return grid;
}

double select_bandwidth_cv(const TrainingSet& data, ClassLabel label,
                           KernelFamily family, std::vector<double> grid,
                           int folds, std::uint64_t seed,
                           std::vector<CvTraceRow>* trace, int threads) {
  if (grid.empty()) throw std::invalid_argument("select_bandwidth_cv: empty grid");
  if (folds < 2) throw std::invalid_argument("select_bandwidth_cv: folds must be >= 2");
  std::sort(grid.begin(), grid.end());

  std::vector<int> class_indices;
  for (int i = 0; i < data.size(); ++i)
    if (data.samples[static_cast<std::size_t>(i)].label == label)
      class_indices.push_back(i);
  const int n = static_cast<int>(class_indices.size());
  if (n < folds)
    throw std::invalid_argument(
        "select_bandwidth_cv: class has fewer samples than folds");

  Rng shuffle_rng(derive_seed(seed, kStreamCvShuffle,
                              static_cast<std::uint64_t>(label)));
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(shuffle_rng.next() %
                                   static_cast<std::uint64_t>(i + 1));
    std::swap(class_indices[static_cast<std::size_t>(i)],
              class_indices[static_cast<std::size_t>(j)]);
  }

  // Per fold: the training-complement event pool and the held-out trains.
  std::vector<std::shared_ptr<const ShapeEvents>> train_events(
      static_cast<std::size_t>(folds));
  std::vector<std::vector<const SpikeTrain*>> held_out(
      static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<const SpikeTrain*> train_part;
    for (int k = 0; k < n; ++k) {
      const SpikeTrain* s =
          &data.samples[static_cast<std::size_t>(class_indices[static_cast<std::size_t>(k)])]
               .train;
      if (k % folds == f)
        held_out[static_cast<std::size_t>(f)].push_back(s);
      else
        train_part.push_back(s);
    }
    train_events[static_cast<std::size_t>(f)] = collect_shape_events(train_part);
  }

  const int n_grid = static_cast<int>(grid.size());
  std::vector<double> scores(static_cast<std::size_t>(n_grid), 0.0);
  std::vector<char> qualified(static_cast<std::size_t>(n_grid), 0);
  std::vector<std::vector<double>> fold_scores(
      static_cast<std::size_t>(n_grid),
      std::vector<double>(static_cast<std::size_t>(folds), 0.0));
  std::vector<std::vector<char>> fold_unclipped(
      static_cast<std::size_t>(n_grid),
      std::vector<char>(static_cast<std::size_t>(folds), 0));

  parallel_for(static_cast<std::int64_t>(n_grid) * folds,
               resolve_threads(threads), [&](std::int64_t task) {
                 const int gi = static_cast<int>(task / folds);
                 const int f = static_cast<int>(task % folds);
                 const AggregatedShape shape(
                     train_events[static_cast<std::size_t>(f)],
                     {family, grid[static_cast<std::size_t>(gi)]}, data.window_T);
                 double ll = 0.0;
                 bool any_unclipped = false;
                 for (const SpikeTrain* s : held_out[static_cast<std::size_t>(f)]) {
                   for (double t : s->times) {
                     const double p = shape.density(t);
                     if (p > kCvDensityFloor) any_unclipped = true;
                     ll += std::log(std::max(p, kCvDensityFloor));
                   }
                 }
                 fold_scores[static_cast<std::size_t>(gi)][static_cast<std::size_t>(f)] = ll;
                 fold_unclipped[static_cast<std::size_t>(gi)][static_cast<std::size_t>(f)] =
                     any_unclipped ? 1 : 0;
               });

  for (int gi = 0; gi < n_grid; ++gi) {
    scores[static_cast<std::size_t>(gi)] =
        std::accumulate(fold_scores[static_cast<std::size_t>(gi)].begin(),
                        fold_scores[static_cast<std::size_t>(gi)].end(), 0.0);
    for (int f = 0; f < folds; ++f)
      if (fold_unclipped[static_cast<std::size_t>(gi)][static_cast<std::size_t>(f)])
        qualified[static_cast<std::size_t>(gi)] = 1;
  }

  if (trace) {
    trace->clear();
    for (int gi = 0; gi < n_grid; ++gi)
      for (int f = 0; f < folds; ++f)
        trace->push_back({grid[static_cast<std::size_t>(gi)], f,
                          fold_scores[static_cast<std::size_t>(gi)][static_cast<std::size_t>(f)]});
  }

  // Single-point grids short-circuit: nothing to compare against.
  if (n_grid == 1) return grid[0];

  int best = -1;
  for (int gi = 0; gi < n_grid; ++gi) {
    if (!qualified[static_cast<std::size_t>(gi)]) continue;
    if (best < 0 || scores[static_cast<std::size_t>(gi)] >
                        scores[static_cast<std::size_t>(best)])
      best = gi;
  }
  if (best < 0)
    throw std::domain_error(
        "select_bandwidth_cv: every grid point fully clipped");
  return grid[static_cast<std::size_t>(best)];
}

void export_estimate_csv(const KernelShapeEstimate& estimate,
                         const std::string& path, int grid_points) {
  if (grid_points < 2)
    throw std::invalid_argument("export_estimate_csv: need grid_points >= 2");
  CsvWriter csv(path);
  csv.row({"class", "t", "p_hat", "tau_hat", "h"});
  struct Side {
    int cls;
    const AggregatedShape* shape;
    double tau;
  };
  const Side sides[2] = {{1, &estimate.p1, estimate.tau1_hat},
                         {2, &estimate.p2, estimate.tau2_hat}};
  for (const Side& side : sides) {
    for (int g = 0; g < grid_points; ++g) {
      const double t = estimate.window_T * g / (grid_points - 1);
      csv.row({std::to_string(side.cls), fmt_double(t),
               fmt_double(side.shape->density(t)), fmt_double(side.tau),
               fmt_double(side.shape->spec().bandwidth)});
    }
  }
  csv.close();
}

}  // namespace spikecls
