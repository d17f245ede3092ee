#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ssep {

// Macroscopic initial density rho0 : R -> (0,1).
// Piecewise kinds are extended by constants outside their knot range.
class Profile {
 public:
  enum class Kind { constant, tanh_ramp, piecewise_linear, custom_table };

  static Profile constant(double c);
  // a + (b - a) * (1 + tanh((u - center) / width)) / 2
  static Profile tanh_ramp(double a, double b, double center, double width);
  static Profile piecewise_linear(std::vector<std::pair<double, double>> knots);
  // monotone cubic (PCHIP) through (grid, values)
  static Profile custom_table(std::vector<double> grid, std::vector<double> values);

  Kind kind() const { return kind_; }
  std::string kind_name() const;

  double operator()(double u) const;
  double derivative(double u) const;
  double chi(double u) const {
    double r = (*this)(u);
    return r * (1.0 - r);
  }

  double rho_min() const { return lo_; }
  double rho_max() const { return hi_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  double constant_value() const { return params_.empty() ? 0.0 : params_[0]; }

  // points where the profile fails to be C^2; quadrature splits here
  const std::vector<double>& breakpoints() const { return breaks_; }

  // largest |rho0'|, used as a Lipschitz constant
  double lipschitz() const { return lip_; }

  const std::vector<double>& params() const { return params_; }

 private:
  Profile() = default;
  void finalize();

  Kind kind_ = Kind::constant;
  std::vector<double> params_;
  std::vector<double> xs_, ys_, slopes_;
  std::shared_ptr<const void> spline_;
  std::vector<double> breaks_;
  double lo_ = 0, hi_ = 0, lip_ = 0;
};

// chi(r) = r (1 - r)
inline double chi_of(double r) { return r * (1.0 - r); }

}  // namespace ssep
