#include "latline/math_kernels.hpp"

#include <cmath>
#include <string>

#include "latline/errors.hpp"

namespace latline {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

// Clamped bisection for a strictly decreasing f on `range`.
template <class F>
double invert_decreasing(F&& f, double y, const Interval& range) {
  if (y >= f(range.lo)) return range.lo;
  if (y <= f(range.hi)) return range.hi;
  double lo = range.lo;
  double hi = range.hi;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    if (std::abs(v - y) <= kBisectionTolerance) break;
    if (v > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("Interval: requires finite lo < hi");
  }
}

double g_exp(double d) {
  require_finite(d, "g_exp");
  if (d < 0.0) throw DomainError("g_exp: negative distance");
  return (d + 1.0) * std::exp(-d);
}

double invert_g_exp(double y, const Interval& range) {
  require_finite(y, "invert_g_exp");
  if (range.lo <= 0.0) throw DomainError("invert_g_exp: range must lie in (0, inf)");
  return invert_decreasing([](double d) { return (d + 1.0) * std::exp(-d); }, y, range);
}

double h_exp(double x, double n) {
  require_finite(x, "h_exp");
  require_finite(n, "h_exp");
  if (x < 0.0 || x > n) throw DomainError("h_exp: x outside [0, n]");
  return std::exp(-x) + std::exp(x - n);
}

double h_lin(double d) {
  require_finite(d, "h_lin");
  if (d < 0.0) throw DomainError("h_lin: negative distance");
  if (d == 0.0) return 2.0;
  // log1p keeps the d -> 0 limit accurate.
  return std::log1p(d) * (2.0 / d + 2.0 / (d + 2.0));
}

double invert_h_lin(double y, const Interval& range) {
  require_finite(y, "invert_h_lin");
  if (range.lo <= 0.0) throw DomainError("invert_h_lin: range must lie in (0, inf)");
  return invert_decreasing([](double d) { return std::log1p(d) * (2.0 / d + 2.0 / (d + 2.0)); },
                           y, range);
}

double g_log(double a, double b) {
  require_finite(a, "g_log");
  require_finite(b, "g_log");
  if (a <= 0.0 || b <= 0.0) throw DomainError("g_log: arguments must be positive");
  if (a == b) return 1.0 / a;
  const double lo = a < b ? a : b;
  const double hi = a < b ? b : a;
  // log(hi/lo) via log1p for nearby arguments.
  const double diff = hi - lo;
  return std::log1p(diff / lo) / diff;
}

double log1m_exp_neg(double d) {
  require_finite(d, "log1m_exp_neg");
  if (d <= 0.0) throw DomainError("log1m_exp_neg: requires d > 0");
  constexpr double kLn2 = 0.693147180559945309417;
  if (d <= kLn2) return std::log(-std::expm1(-d));
  return std::log1p(-std::exp(-d));
}

}  // namespace latline
