#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pushguide/errors.hpp"

namespace pushguide::numerics {

namespace detail {

template <typename F>
double simpson(F&& f, double a, double fa, double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(F&& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0) throw NumericsError("adaptive quadrature: recursion depth exhausted");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with mixed tolerance
/// |error| <= rel_tol * |integral| + abs_tol.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-8,
                        double abs_tol = 0.0, int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = detail::simpson(f, a, fa, b, fb, m, fm);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole,
                               tol > 0 ? tol : 1e-300, max_depth);
}

/// Bisection on a bracketing interval [lo, hi] with f(lo), f(hi) of opposite
/// sign; returns the midpoint of the final interval of width <= xtol.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw NumericsError("bisection: interval does not bracket a root");
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0) return mid;
    if ((fmid > 0) == (flo > 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Piecewise-linear interpolation on a sorted grid; clamps outside the range.
inline double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                            double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const std::size_t i = std::size_t(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

/// SplitMix64: tiny counter-based generator used for reproducible Monte
/// Carlo substreams (bit-stable across platforms).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Marsaglia polar (no cached spare: deterministic
  /// draw count per call pair is not needed, streams are per-atom).
  double normal() {
    while (true) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
};

/// Deterministic derivation of independent per-atom seeds.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xd1342543de82ef95ULL * (index + 1)));
  return g.next();
}

}  // namespace pushguide::numerics
