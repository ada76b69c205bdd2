#include "spikecls/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spikecls/quadrature.hpp"

namespace spikecls {

namespace {

constexpr double kHarmonicBase = 1.6;
constexpr double kHarmonicAmp2 = 0.5;
const double kOmega1 = std::numbers::pi / (4.0 * std::sqrt(3.0));
const double kOmega2 = std::numbers::pi / (3.0 * std::sqrt(2.0));
const double kPsi = std::numbers::pi / 4.0;

double harmonic_eval(double t, double phase) {
  return kHarmonicBase + std::cos(kOmega1 * t + phase) +
         kHarmonicAmp2 * std::cos(kOmega2 * t + kPsi + phase);
}

double harmonic_antiderivative(double t, double phase) {
  return kHarmonicBase * t + std::sin(kOmega1 * t + phase) / kOmega1 +
         kHarmonicAmp2 * std::sin(kOmega2 * t + kPsi + phase) / kOmega2;
}

double gaussian_bump_antiderivative(double t, double amplitude, double width) {
  const double root = std::sqrt(width);
  return amplitude * 0.5 * std::sqrt(std::numbers::pi / width) *
         std::erf(root * (t - 0.5));
}

void check_window(double a, double b) {
  if (!(a >= 0.0) || !(a <= b))
    throw std::invalid_argument("integrate: need 0 <= a <= b");
}

}  // namespace

IntensityModel IntensityModel::homogeneous(double rate) {
  if (!(rate >= 0.0)) throw std::invalid_argument("homogeneous: rate must be >= 0");
  IntensityModel m;
  m.kind_ = IntensityKind::homogeneous;
  m.p0_ = rate;
  return m;
}

IntensityModel IntensityModel::harmonic(double phase) {
  IntensityModel m;
  m.kind_ = IntensityKind::harmonic;
  m.p0_ = phase;
  return m;
}

IntensityModel IntensityModel::gaussian_bump(double amplitude, double width) {
  if (!(amplitude > 0.0) || !(width > 0.0))
    throw std::invalid_argument("gaussian_bump: amplitude and width must be > 0");
  IntensityModel m;
  m.kind_ = IntensityKind::gaussian_bump;
  m.p0_ = amplitude;
  m.p1_ = width;
  return m;
}

IntensityModel IntensityModel::scaled(IntensityModel base, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  IntensityModel m;
  m.kind_ = IntensityKind::scaled;
  m.p1_ = factor;
  m.base_ = std::make_shared<const IntensityModel>(std::move(base));
  return m;
}

IntensityModel IntensityModel::tabulated(std::vector<double> t,
                                         std::vector<double> rate) {
  if (t.empty() || t.size() != rate.size())
    throw std::invalid_argument("tabulated: need matching nonempty columns");
  auto table = std::make_shared<std::vector<std::pair<double, double>>>();
  table->reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("tabulated: grid must be strictly increasing");
    if (!(rate[i] >= 0.0))
      throw std::invalid_argument("tabulated: rates must be >= 0");
    table->emplace_back(t[i], rate[i]);
  }
  IntensityModel m;
  m.kind_ = IntensityKind::tabulated;
  m.table_ = std::move(table);
  return m;
}

IntensityModel IntensityModel::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tabulated_from_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("tabulated_from_csv: empty file " + path);
  std::vector<double> t, rate;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error("tabulated_from_csv: bad row: " + line);
    t.push_back(std::stod(a));
    rate.push_back(std::stod(b));
  }
  return tabulated(std::move(t), std::move(rate));
}

double IntensityModel::eval(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("eval: t must be >= 0");
  switch (kind_) {
    case IntensityKind::homogeneous:
      return p0_;
    case IntensityKind::harmonic:
      return harmonic_eval(t, p0_);
    case IntensityKind::gaussian_bump:
      return p0_ * std::exp(-p1_ * (t - 0.5) * (t - 0.5));
    case IntensityKind::scaled:
      return p1_ * base_->eval(t);
    case IntensityKind::tabulated: {
      const auto& tab = *table_;
      if (t <= tab.front().first) return tab.front().second;
      if (t >= tab.back().first) return tab.back().second;
      auto it = std::upper_bound(
          tab.begin(), tab.end(), t,
          [](double v, const std::pair<double, double>& n) { return v < n.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (t - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return 0.0;
}

bool IntensityModel::has_closed_form_integral() const {
  switch (kind_) {
    case IntensityKind::homogeneous:
    case IntensityKind::harmonic:
    case IntensityKind::gaussian_bump:
    case IntensityKind::tabulated:
      return true;
    case IntensityKind::scaled:
      return base_->has_closed_form_integral();
  }
  return false;
}

double IntensityModel::integrate(double a, double b) const {
  check_window(a, b);
  switch (kind_) {
    case IntensityKind::homogeneous:
      return p0_ * (b - a);
    case IntensityKind::harmonic:
      return harmonic_antiderivative(b, p0_) - harmonic_antiderivative(a, p0_);
    case IntensityKind::gaussian_bump:
      return gaussian_bump_antiderivative(b, p0_, p1_) -
             gaussian_bump_antiderivative(a, p0_, p1_);
    case IntensityKind::scaled:
      return p1_ * base_->integrate(a, b);
    case IntensityKind::tabulated: {
      // Trapezoid over the node grid, with interpolated partial segments.
      const auto& tab = *table_;
      double total = 0.0;
      double lo = a;
      for (std::size_t i = 0; i + 1 < tab.size() && lo < b; ++i) {
        const double segment_hi = tab[i + 1].first;
        if (segment_hi <= lo) continue;
        const double hi = std::min(segment_hi, b);
        if (tab[i].first >= b) break;
        const double left = std::max(lo, tab[i].first);
        if (left < hi)
          total += 0.5 * (eval(left) + eval(hi)) * (hi - left);
        lo = hi;
      }
      // Constant extrapolation outside the node range.
      if (a < tab.front().first)
        total += tab.front().second * (std::min(b, tab.front().first) - a);
      if (b > tab.back().first)
        total += tab.back().second * (b - std::max(a, tab.back().first));
      return total;
    }
  }
  return 0.0;
}

double IntensityModel::integrate_quadrature(double a, double b) const {
  check_window(a, b);
  return integrate_adaptive([this](double t) { return eval(t); }, a, b);
}

double IntensityModel::sup_bound(double T) const {
  switch (kind_) {
    case IntensityKind::homogeneous:
      return p0_;
    case IntensityKind::harmonic:
      return kHarmonicBase + 1.0 + kHarmonicAmp2;
    case IntensityKind::gaussian_bump:
      if (T >= 0.5) return p0_;
      return eval(T);
    case IntensityKind::scaled:
      return p1_ * base_->sup_bound(T);
    case IntensityKind::tabulated: {
      double sup = std::max(eval(0.0), eval(T));
      for (const auto& [t, r] : *table_)
        if (t >= 0.0 && t <= T) sup = std::max(sup, r);
      return sup;
    }
  }
  return 0.0;
}

std::string IntensityModel::describe() const {
  std::ostringstream ss;
  switch (kind_) {
    case IntensityKind::homogeneous:
      ss << "homogeneous(rate=" << p0_ << ")";
      break;
    case IntensityKind::harmonic:
      ss << "harmonic(phase=" << p0_ << ")";
      break;
    case IntensityKind::gaussian_bump:
      ss << "gaussian_bump(amplitude=" << p0_ << ", width=" << p1_ << ")";
      break;
    case IntensityKind::scaled:
      ss << "scaled(factor=" << p1_ << ", base=" << base_->describe() << ")";
      break;
    case IntensityKind::tabulated:
      ss << "tabulated(" << table_->size() << " nodes)";
      break;
  }
  return ss.str();
}

ShapeDecomposition shape_decompose(const IntensityModel& model, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("shape_decompose: T must be > 0");
  const double tau = model.integrate(0.0, T);
  if (!(tau > 0.0))
    throw std::domain_error("shape_decompose: zero total mass on [0, T]");
  return ShapeDecomposition{model, tau, T};
}

namespace {

// Both kl integrals share the window check and the positivity scan.
void check_kl_pair(const ShapeDecomposition& p, const ShapeDecomposition& q) {
  if (p.window_T != q.window_T)
    throw std::invalid_argument("kl: shape windows differ");
  constexpr int kGuardGrid = 4096;
  const double T = p.window_T;
  for (int i = 0; i <= kGuardGrid; ++i) {
    const double t = T * static_cast<double>(i) / kGuardGrid;
    if (p.shape(t) < kRateFloor || q.shape(t) < kRateFloor)
      throw std::domain_error(
          "kl: shape density below positivity floor on the window");
  }
}

}  // namespace

double kl_divergence(const ShapeDecomposition& p, const ShapeDecomposition& q) {
  check_kl_pair(p, q);
  return integrate_adaptive(
      [&](double t) {
        const double pv = p.shape(t);
        return std::log(pv / q.shape(t)) * pv;
      },
      0.0, p.window_T);
}

double kl_variation(const ShapeDecomposition& p, const ShapeDecomposition& q) {
  check_kl_pair(p, q);
  return integrate_adaptive(
      [&](double t) {
        const double pv = p.shape(t);
        const double r = std::log(pv / q.shape(t));
        return r * r * pv;
      },
      0.0, p.window_T);
}

double bhattacharyya_exponent(const IntensityModel& lambda1,
                              const IntensityModel& lambda2, double T) {
  if (!(T > 0.0))
    throw std::invalid_argument("bhattacharyya_exponent: T must be > 0");
  const double beta = integrate_adaptive(
      [&](double t) {
        const double a = lambda1.eval(t);
        const double b = lambda2.eval(t);
        return 0.5 * a + 0.5 * b - std::sqrt(a * b);
      },
      0.0, T);
  // The integrand is (sqrt(a) - sqrt(b))^2 / 2 >= 0 pointwise; only rounding
  // noise can push the total below zero.
  return std::max(beta, 0.0);
}

double bhattacharyya_bound(double exponent, double pi1, double pi2) {
  return std::sqrt(pi1 * pi2) * std::exp(-exponent);
}

IntensityBounds verify_bounds(const IntensityModel& model, double T,
                              int grid_points) {
  if (grid_points < 2)
    throw std::invalid_argument("verify_bounds: need grid_points >= 2");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double t = T * static_cast<double>(i) / (grid_points - 1);
    const double v = model.eval(t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  IntensityBounds out;
  out.delta = lo;
  out.C = hi;
  out.d_hat = model.integrate(0.0, T) / T;
  out.a1_violated = lo < kRateFloor;
  return out;
}

IntensityBounds combine_bounds(const IntensityBounds& b1,
                               const IntensityBounds& b2) {
  IntensityBounds out;
  out.delta = std::min(b1.delta, b2.delta);
  out.C = std::max(b1.C, b2.C);
  out.d_hat = 0.5 * (b1.d_hat + b2.d_hat);
  out.a1_violated = b1.a1_violated || b2.a1_violated;
  return out;
}

}  // namespace spikecls
