#pragma once

#include <cmath>
#include <vector>

#include "spikecls/intensity.hpp"
#include "spikecls/rng.hpp"
#include "spikecls/simulate.hpp"

namespace testsupport {

// Independent midpoint-rule oracle; deliberately not the adaptive Simpson
// route used by the library.
template <class F>
double riemann(F f, double a, double b, int n = 1000000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Random harmonic phase pair with distinct phases.
inline std::pair<double, double> random_phase_pair(spikecls::Rng& rng) {
  const double phi1 = 0.05 + 1.5 * rng.uniform();
  const double phi2 = phi1 + 0.05 + 1.5 * rng.uniform();
  return {phi1, phi2};
}

// Synthetic strictly increasing train with n events spread over (0, T).
inline spikecls::SpikeTrain uniform_train(int n, double T) {
  spikecls::SpikeTrain x;
  x.window_T = T;
  for (int i = 1; i <= n; ++i) x.times.push_back(T * i / (n + 1));
  return x;
}

}  // namespace testsupport
