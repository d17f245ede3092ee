#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ssep/error.hpp"

namespace ssep {

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double cutoff = 8.0;  // spatial truncation, units of sqrt(2T)
  unsigned max_depth = 15;

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0))
      throw Error(ErrorCode::invalid_input, "quadrature tolerances must be positive");
    if (!(cutoff >= 6)) throw Error(ErrorCode::invalid_input, "quadrature cutoff must be >= 6");
    if (max_depth < 1) throw Error(ErrorCode::invalid_input, "quadrature max_depth must be >= 1");
  }

  QuadratureSettings tighter(double factor) const {
    QuadratureSettings q = *this;
    q.rel_tol /= factor;
    q.abs_tol /= factor;
    return q;
  }
};

struct QuadResult {
  double value = 0;
  double error = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

// Globally adaptive Gauss-Kronrod (21 point) on [a, b]: the interval with the
// largest error is bisected until the total error meets
// max(abs_tol, rel_tol * L1). Intervals stop splitting at max_depth, and at
// most kMaxQuadIntervals are kept. Throws QuadratureError when the target is
// missed by more than a factor of 10.
inline constexpr std::size_t kMaxQuadIntervals = 2000;

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSettings& q) {
  if (!(b > a)) return {};
  struct Piece {
    double lo, hi, value, err, l1;
    unsigned depth;
  };
  // rule applied in local coordinates on [0, 1]; Boost's own affine map gives
  // inflated error estimates on short intervals far from the origin
  auto rule = [&](double lo, double hi, unsigned depth) {
    const double h = hi - lo;
    double err = 0, l1 = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate([&](double x) { return h * f(lo + h * x); },
                                                                             0.0, 1.0, 0, 0.0, &err, &l1);
    return Piece{lo, hi, v, err, l1, depth};
  };
  auto by_err = [](const Piece& x, const Piece& y) { return x.err < y.err; };
  std::vector<Piece> heap{rule(a, b, 0)};
  double value = heap[0].value, err = heap[0].err, l1 = heap[0].l1;
  std::vector<Piece> done;  // at max depth
  while (!heap.empty() && err > std::max(q.abs_tol, q.rel_tol * l1) && heap.size() + done.size() < kMaxQuadIntervals) {
    std::pop_heap(heap.begin(), heap.end(), by_err);
    Piece p = heap.back();
    heap.pop_back();
    if (p.depth >= q.max_depth) {
      done.push_back(p);
      continue;
    }
    double mid = 0.5 * (p.lo + p.hi);
    Piece l = rule(p.lo, mid, p.depth + 1), r = rule(mid, p.hi, p.depth + 1);
    value += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    l1 += l.l1 + r.l1 - p.l1;
    for (const Piece& c : {l, r}) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), by_err);
    }
  }
  // re-add to avoid drift from the running sums
  value = err = l1 = 0;
  for (const auto* v : {&heap, &done})
    for (const Piece& p : *v) {
      value += p.value;
      err += p.err;
      l1 += p.l1;
    }
  double target = std::max(q.abs_tol, q.rel_tol * l1);
  if (!std::isfinite(value) || err > 10.0 * target)
    throw QuadratureError("adaptive quadrature missed tolerance on [" + std::to_string(a) + ", " + std::to_string(b) +
                              "]: error " + std::to_string(err),
                          value, err);
  return {value, err};
}

// Same, splitting [a, b] at the given interior points.
template <class F>
QuadResult integrate_split(F&& f, double a, double b, std::vector<double> cuts, const QuadratureSettings& q) {
  QuadResult total;
  if (!(b > a)) return total;
  std::sort(cuts.begin(), cuts.end());
  double lo = a;
  for (double c : cuts) {
    if (c <= lo || c >= b) continue;
    total += integrate(f, lo, c, q);
    lo = c;
  }
  total += integrate(f, lo, b, q);
  return total;
}

}  // namespace ssep
