#pragma once

#include <cmath>
#include <numbers>

namespace ssep {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

inline double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// p_t(u, v): Gaussian density of variance 2t at u - v. Throws invalid-time for t <= 0.
double heat_kernel(double t, double u, double v);

// P[B_s >= a] with Var(B_s) = 2s; s = 0 gives the indicator of a <= 0.
inline double bm_tail_ge(double s, double a) {
  if (s <= 0) return a <= 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(a / (2.0 * std::sqrt(s)));
}

// P[B_s <= a]
inline double bm_tail_le(double s, double a) { return bm_tail_ge(s, -a); }

// K(a, x) = int_0^a p_r(x) dr
//         = sqrt(a/pi) exp(-x^2/4a) - |x|/2 erfc(|x| / (2 sqrt a))
inline double integrated_kernel(double a, double x) {
  if (a <= 0) return 0.0;
  double ax = std::abs(x);
  double sa = std::sqrt(a);
  return sa / std::sqrt(std::numbers::pi) * std::exp(-x * x / (4.0 * a)) - 0.5 * ax * std::erfc(ax / (2.0 * sa));
}

}  // namespace ssep
