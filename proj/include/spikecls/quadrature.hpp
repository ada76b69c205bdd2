#pragma once

#include <cmath>
#include <stdexcept>

namespace spikecls {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 50;
};

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double m, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth, int max_depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= max_depth || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol,
                              depth + 1, max_depth) +
         adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol,
                              depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. The interval is pre-split into fixed panels so
// that integrands with narrow features away from the endpoints are not missed
// by the first error estimate.
template <class F>
double integrate_adaptive(const F& f, double a, double b,
                          QuadratureOptions opt = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: a > b");
  if (a == b) return 0.0;
  constexpr int kPanels = 8;
  const double panel_tol = opt.abs_tol / kPanels;
  const double width = (b - a) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double pa = a + p * width;
    const double pb = (p == kPanels - 1) ? b : pa + width;
    const double pm = 0.5 * (pa + pb);
    const double fa = f(pa);
    const double fm = f(pm);
    const double fb = f(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += detail::adaptive_simpson_rec(f, pa, pm, pb, fa, fm, fb, whole,
                                          panel_tol, 0, opt.max_depth);
  }
  return total;
}

}  // namespace spikecls
