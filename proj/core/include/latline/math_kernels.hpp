#pragma once

// Scalar kernels behind the distance estimators: the common-neighbour
// profiles of both decay models, their monotone inversions, and a stable
// log(1 - e^-d).

namespace latline {

/// Closed interval [lo, hi] with lo < hi, both finite.
struct Interval {
  double lo;
  double hi;

  Interval(double lo_, double hi_);
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Inversion windows used by the exponential and linear estimators.
inline const Interval kExpInversionRange{0.3, 2.5};
inline const Interval kLinInversionRange{0.3, 2.0};

/// Bisection stops once |f(d) - y| <= this, or after kBisectionMaxIter steps.
inline constexpr double kBisectionTolerance = 1e-12;
inline constexpr int kBisectionMaxIter = 200;

/// (d + 1) e^{-d}; decreasing on d > 0 with values in (0, 1].
double g_exp(double d);

/// Inverse of g_exp restricted to `range`, clamping to the range ends.
double invert_g_exp(double y, const Interval& range);

/// e^{-x} + e^{x - n} for 0 <= x <= n.
double h_exp(double x, double n);

/// log(d + 1) (2/d + 2/(d + 2)), with the continuity value 2 at d = 0.
double h_lin(double d);

/// Inverse of h_lin restricted to `range`, clamping to the range ends.
double invert_h_lin(double y, const Interval& range);

/// Mean of 1/x over [min(a,b), max(a,b)]: (log b - log a)/(b - a), or 1/a
/// when a == b. Symmetric in its arguments.
double g_log(double a, double b);

/// log(1 - e^{-d}) for d > 0, accurate to ~1e-15 relative.
double log1m_exp_neg(double d);

}  // namespace latline
