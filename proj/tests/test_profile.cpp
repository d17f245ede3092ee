#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ssep/error.hpp"
#include "ssep/profile.hpp"
#include "ssep/quadrature.hpp"
#include "ssep/special.hpp"
#include "ssep/test_function.hpp"

using namespace ssep;

namespace {
// independent numerical integration for oracles
template <class F>
double tsq(F f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b);
}
}  // namespace

TEST_CASE("profiles stay inside their bounds") {
  std::vector<Profile> ps = {Profile::constant(0.4), Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5),
                             Profile::piecewise_linear({{-1, 0.2}, {0, 0.6}, {1, 0.3}}),
                             Profile::custom_table({-2, -1, 0, 1, 2}, {0.2, 0.25, 0.5, 0.7, 0.8})};
  for (const auto& p : ps)
    for (double u = -5; u <= 5; u += 0.01) {
      REQUIRE(p(u) >= p.rho_min() - 1e-15);
      REQUIRE(p(u) <= p.rho_max() + 1e-15);
      REQUIRE(std::isfinite(p.derivative(u)));
    }
  CHECK(Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5)(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("profile derivatives match finite differences away from knots") {
  auto p = Profile::tanh_ramp(0.2, 0.9, 0.3, 0.7);
  auto t = Profile::custom_table({-2, -1, 0, 1, 2}, {0.2, 0.25, 0.5, 0.7, 0.8});
  for (double u : {-1.3, -0.2, 0.4, 1.7}) {
    const double h = 1e-6;
    CHECK(p.derivative(u) == doctest::Approx((p(u + h) - p(u - h)) / (2 * h)).epsilon(1e-7));
    CHECK(t.derivative(u) == doctest::Approx((t(u + h) - t(u - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("profiles touching 0 or 1 are rejected") {
  CHECK_THROWS_AS(Profile::constant(1.0), Error);
  CHECK_THROWS_AS(Profile::constant(0.0), Error);
  CHECK_THROWS_AS(Profile::tanh_ramp(0.0, 0.5, 0, 1), Error);
  CHECK_THROWS_AS(Profile::piecewise_linear({{0, 0.5}, {1, 1.0}}), Error);
  try {
    Profile::constant(1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_profile);
  }
}

TEST_CASE("heat kernel") {
  const double t = 0.37;
  CHECK(heat_kernel(t, 0.2, 0.2) == doctest::Approx(1.0 / std::sqrt(4 * std::numbers::pi * t)).epsilon(1e-15));
  CHECK(heat_kernel(t, 0.1, 0.9) == heat_kernel(t, 0.9, 0.1));
  double mass = tsq([&](double v) { return heat_kernel(t, 0.3, v); }, -20, 20);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(heat_kernel(0.0, 0, 0), Error);
  CHECK_THROWS_AS(heat_kernel(-1.0, 0, 0), Error);
}

TEST_CASE("Brownian tails use variance 2s") {
  for (double s : {0.1, 1.0, 3.0})
    for (double a : {-1.0, 0.0, 0.4, 2.0}) {
      double num = tsq([&](double v) { return heat_kernel(s, 0.0, v); }, a, a + 60);
      CHECK(bm_tail_ge(s, a) == doctest::Approx(num).epsilon(1e-10));
      CHECK(bm_tail_le(s, a) == doctest::Approx(1.0 - num).epsilon(1e-10));
    }
  CHECK(bm_tail_ge(0.0, 0.0) == 1.0);
  CHECK(bm_tail_ge(0.0, 0.1) == 0.0);
}

TEST_CASE("integrated kernel equals the time integral of the heat kernel") {
  for (double a : {0.05, 0.5, 2.0})
    for (double x : {0.0, 0.1, -0.7, 1.5}) {
      double num = x == 0.0 ? tsq([&](double r) { return 1.0 / std::sqrt(4 * std::numbers::pi * r); }, 0, a)
                            : tsq([&](double r) { return heat_kernel(r, 0, x); }, 0, a);
      CHECK(integrated_kernel(a, x) == doctest::Approx(num).epsilon(1e-9));
    }
}

TEST_CASE("test-function semigroup and gradient against quadrature") {
  std::vector<TestFunction> fs = {TestFunction::indicator(-0.3, 0.5), TestFunction::triangle(0.2, 0.4, 2.0),
                                  TestFunction::clipped_ramp(0.1, 1.5)};
  for (const auto& f : fs)
    for (double t : {0.01, 0.3})
      for (double u : {-0.5, 0.15, 0.9}) {
        double num = 0;
        auto cuts = f.breakpoints();
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
          num += tsq([&](double v) { return heat_kernel(t, u, v) * f(v); }, cuts[i], cuts[i + 1]);
        CHECK(f.semigroup(t, u) == doctest::Approx(num).epsilon(1e-9));
        const double h = 1e-5;
        double fd = (f.semigroup(t, u + h) - f.semigroup(t, u - h)) / (2 * h);
        CHECK(f.semigroup_gradient(t, u) == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
      }
  auto g = TestFunction::clipped_ramp(0.0, 2.0);
  CHECK(g(0.0) == 1.0);
  CHECK(g(1.0) == doctest::Approx(0.5));
  CHECK(g(2.0) == 0.0);
  CHECK(g(-0.01) == 0.0);
}

TEST_CASE("quadrature settings and failures") {
  QuadratureSettings q;
  CHECK(q.rel_tol == 1e-8);
  CHECK(q.abs_tol == 1e-12);
  CHECK(q.cutoff == 8.0);
  q.cutoff = 5.0;
  CHECK_THROWS_AS(q.validate(), Error);
  QuadratureSettings ok;
  auto r = integrate([](double x) { return std::exp(-x * x); }, -10, 10, ok);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(r.error >= 0);
  QuadratureSettings shallow;
  shallow.max_depth = 1;
  shallow.rel_tol = 1e-14;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0, 1, shallow), QuadratureError);
}
