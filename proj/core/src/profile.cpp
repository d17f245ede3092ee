#include "ssep/profile.hpp"

#include <algorithm>
#include <cmath>
// boost 1.74 pchip calls unqualified isnan
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "ssep/error.hpp"

namespace ssep {

namespace {
using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
}

Profile Profile::constant(double c) {
  Profile p;
  p.kind_ = Kind::constant;
  p.params_ = {c};
  p.finalize();
  return p;
}

Profile Profile::tanh_ramp(double a, double b, double center, double width) {
  if (!(width > 0)) throw Error(ErrorCode::invalid_profile, "tanh-ramp width must be positive");
  Profile p;
  p.kind_ = Kind::tanh_ramp;
  p.params_ = {a, b, center, width};
  p.finalize();
  return p;
}

Profile Profile::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw Error(ErrorCode::invalid_profile, "piecewise-linear needs at least one knot");
  std::sort(knots.begin(), knots.end());
  Profile p;
  p.kind_ = Kind::piecewise_linear;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw Error(ErrorCode::invalid_profile, "piecewise-linear knots must be distinct");
    p.xs_.push_back(knots[i].first);
    p.ys_.push_back(knots[i].second);
  }
  for (std::size_t i = 0; i + 1 < p.xs_.size(); ++i)
    p.slopes_.push_back((p.ys_[i + 1] - p.ys_[i]) / (p.xs_[i + 1] - p.xs_[i]));
  p.breaks_ = p.xs_;
  p.finalize();
  return p;
}

Profile Profile::custom_table(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() != values.size() || grid.size() < 4)
    throw Error(ErrorCode::invalid_profile, "custom-table needs >= 4 matching grid/value entries");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::invalid_profile, "custom-table grid must increase");
  Profile p;
  p.kind_ = Kind::custom_table;
  p.xs_ = grid;
  p.ys_ = values;
  p.breaks_ = grid;
  // zero end slopes so the constant extension is C^1
  p.spline_ = std::make_shared<Pchip>(std::vector<double>(grid), std::vector<double>(values), 0.0, 0.0);
  p.finalize();
  return p;
}

std::string Profile::kind_name() const {
  switch (kind_) {
    case Kind::constant: return "constant";
    case Kind::tanh_ramp: return "tanh-ramp";
    case Kind::piecewise_linear: return "piecewise-linear";
    case Kind::custom_table: return "custom-table";
  }
  return "?";
}

double Profile::operator()(double u) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::tanh_ramp:
      return params_[0] + (params_[1] - params_[0]) * 0.5 * (1.0 + std::tanh((u - params_[2]) / params_[3]));
    case Kind::piecewise_linear: {
      if (u <= xs_.front()) return ys_.front();
      if (u >= xs_.back()) return ys_.back();
      auto i = std::size_t(std::upper_bound(xs_.begin(), xs_.end(), u) - xs_.begin()) - 1;
      return ys_[i] + slopes_[i] * (u - xs_[i]);
    }
    case Kind::custom_table: {
      if (u <= xs_.front()) return ys_.front();
      if (u >= xs_.back()) return ys_.back();
      return (*static_cast<const Pchip*>(spline_.get()))(u);
    }
  }
  return 0;
}

double Profile::derivative(double u) const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::tanh_ramp: {
      double s = 1.0 / std::cosh((u - params_[2]) / params_[3]);
      return (params_[1] - params_[0]) * 0.5 * s * s / params_[3];
    }
    case Kind::piecewise_linear: {
      if (u < xs_.front() || u >= xs_.back()) return 0.0;
      auto i = std::size_t(std::upper_bound(xs_.begin(), xs_.end(), u) - xs_.begin()) - 1;
      return slopes_[i];
    }
    case Kind::custom_table: {
      if (u <= xs_.front() || u >= xs_.back()) return 0.0;
      return static_cast<const Pchip*>(spline_.get())->prime(u);
    }
  }
  return 0;
}

void Profile::finalize() {
  switch (kind_) {
    case Kind::constant:
      lo_ = hi_ = params_[0];
      lip_ = 0;
      break;
    case Kind::tanh_ramp:
      lo_ = std::min(params_[0], params_[1]);
      hi_ = std::max(params_[0], params_[1]);
      lip_ = std::abs(params_[1] - params_[0]) * 0.5 / params_[3];
      break;
    case Kind::piecewise_linear:
      lo_ = *std::min_element(ys_.begin(), ys_.end());
      hi_ = *std::max_element(ys_.begin(), ys_.end());
      lip_ = 0;
      for (double s : slopes_) lip_ = std::max(lip_, std::abs(s));
      break;
    case Kind::custom_table: {
      // PCHIP does not overshoot the data, so the data range bounds it
      lo_ = *std::min_element(ys_.begin(), ys_.end());
      hi_ = *std::max_element(ys_.begin(), ys_.end());
      lip_ = 0;
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        double h = xs_[i + 1] - xs_[i];
        for (int k = 0; k <= 8; ++k) lip_ = std::max(lip_, std::abs(derivative(xs_[i] + h * k / 8.0)));
      }
      break;
    }
  }
  if (!(lo_ > 0.0) || !(hi_ < 1.0) || !std::isfinite(lo_) || !std::isfinite(hi_))
    throw Error(ErrorCode::invalid_profile,
                "profile values must lie in the open interval (0,1), got range [" + std::to_string(lo_) + ", " +
                    std::to_string(hi_) + "]");
}

}  // namespace ssep
