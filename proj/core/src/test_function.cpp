#include "ssep/test_function.hpp"

#include <algorithm>
#include <cmath>

#include "ssep/error.hpp"
#include "ssep/special.hpp"

namespace ssep {

TestFunction::TestFunction(std::vector<Segment> segs) : segs_(std::move(segs)) {
  for (const auto& s : segs_)
    if (!(s.hi > s.lo) || !std::isfinite(s.lo) || !std::isfinite(s.hi))
      throw Error(ErrorCode::invalid_input, "test function segments need finite lo < hi");
  std::sort(segs_.begin(), segs_.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < segs_.size(); ++i)
    if (segs_[i].lo < segs_[i - 1].hi) throw Error(ErrorCode::invalid_input, "test function segments overlap");
}

TestFunction TestFunction::indicator(double a, double b) { return TestFunction({{a, b, 1.0, 0.0}}); }

TestFunction TestFunction::triangle(double center, double half, double height) {
  double k = height / half;
  return TestFunction({{center - half, center, height - k * center, k}, {center, center + half, height + k * center, -k}});
}

TestFunction TestFunction::clipped_ramp(double u, double K) {
  return TestFunction({{u, u + K, 1.0 + u / K, -1.0 / K}});
}

double TestFunction::operator()(double v) const {
  for (const auto& s : segs_)
    if (v >= s.lo && v < s.hi) return s.c0 + s.c1 * v;
  return 0.0;
}

double TestFunction::semigroup(double t, double u) const {
  if (t <= 0) return (*this)(u);
  double sig = std::sqrt(2.0 * t);
  double acc = 0;
  for (const auto& s : segs_) {
    double za = (s.lo - u) / sig, zb = (s.hi - u) / sig;
    if (za > 9 || zb < -9) continue;
    double mass = 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
    acc += (s.c0 + s.c1 * u) * mass + s.c1 * sig * (std_normal_pdf(za) - std_normal_pdf(zb));
  }
  return acc;
}

double TestFunction::semigroup_gradient(double t, double u) const {
  if (!(t > 0)) throw Error(ErrorCode::invalid_time, "semigroup gradient needs t > 0");
  double sig = std::sqrt(2.0 * t);
  double acc = 0, scale = 0;
  for (const auto& s : segs_) scale = std::max({scale, std::abs(s.c0 + s.c1 * s.lo), std::abs(s.c0 + s.c1 * s.hi)});
  // jumps are merged per breakpoint first: the 1/sig factor would blow up the
  // rounding residue of two nearly cancelling one-sided values
  auto jump_term = [&](double x, double jump) {
    if (std::abs(jump) <= 1e-12 * scale) return;
    double z = (x - u) / sig;
    if (std::abs(z) <= 9) acc += jump * std_normal_pdf(z) / sig;
  };
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const auto& s = segs_[i];
    double za = (s.lo - u) / sig, zb = (s.hi - u) / sig;
    if (!(za > 9 || zb < -9))
      acc += s.c1 * 0.5 * (std::erfc(-zb / std::numbers::sqrt2) - std::erfc(-za / std::numbers::sqrt2));
    double left = (i > 0 && segs_[i - 1].hi == s.lo) ? segs_[i - 1].c0 + segs_[i - 1].c1 * s.lo : 0.0;
    jump_term(s.lo, s.c0 + s.c1 * s.lo - left);
    if (i + 1 == segs_.size() || segs_[i + 1].lo != s.hi) jump_term(s.hi, -(s.c0 + s.c1 * s.hi));
  }
  return acc;
}

double TestFunction::support_lo() const { return segs_.empty() ? 0.0 : segs_.front().lo; }
double TestFunction::support_hi() const { return segs_.empty() ? 0.0 : segs_.back().hi; }

std::vector<double> TestFunction::breakpoints() const {
  std::vector<double> b;
  for (const auto& s : segs_) {
    b.push_back(s.lo);
    b.push_back(s.hi);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace ssep
