#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace sleppulse::detail {

// Newton with bisection fallback on a sign-changing bracket. f returns (value, derivative).
template <typename F>
double safeguarded_newton(F&& f, double lo, double hi, double xtol = 0.0, int max_iter = 200) {
  auto [flo, dlo] = f(lo);
  (void)dlo;
  if (flo == 0.0) return lo;
  const bool lo_neg = flo < 0.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    auto [fx, dfx] = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == lo_neg) lo = x; else hi = x;
    double next = x - fx / dfx;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    const double tol = xtol > 0.0 ? xtol : 4e-16 * std::max(1.0, std::abs(next));
    if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
    x = next;
  }
  return x;
}

// Plain bisection to the resolution of the doubles in the bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol = 0.0, int max_iter = 400) {
  const bool lo_neg = f(lo) < 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || (xtol > 0.0 && hi - lo <= xtol)) break;
    ((f(mid) < 0.0) == lo_neg ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sleppulse::detail
