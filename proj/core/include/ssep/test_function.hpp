#pragma once

#include <vector>

namespace ssep {

// Compactly supported, piecewise-linear test function, possibly with jumps.
// On each segment [lo, hi) it equals c0 + c1 * v.
class TestFunction {
 public:
  struct Segment {
    double lo, hi, c0, c1;
  };

  TestFunction() = default;
  explicit TestFunction(std::vector<Segment> segs);

  static TestFunction zero() { return TestFunction(); }
  static TestFunction indicator(double a, double b);
  // tent of given height, supported on [center - half, center + half]
  static TestFunction triangle(double center, double half_width, double height = 1.0);
  // G^K_u(v) = (1 - (v - u)/K)^+ 1{v >= u}
  static TestFunction clipped_ramp(double u, double K);

  double operator()(double v) const;
  // (T_t f)(u) = int p_t(u, v) f(v) dv, closed form through erf/exp
  double semigroup(double t, double u) const;
  // d/du (T_t f)(u), t > 0
  double semigroup_gradient(double t, double u) const;

  bool empty() const { return segs_.empty(); }
  double support_lo() const;
  double support_hi() const;
  // segment endpoints, where f may jump or kink
  std::vector<double> breakpoints() const;
  const std::vector<Segment>& segments() const { return segs_; }

 private:
  std::vector<Segment> segs_;
};

}  // namespace ssep
