#include "ssep/limit_gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "ssep/error.hpp"
#include "ssep/special.hpp"

namespace ssep {

std::string to_string(LimitKind k) {
  switch (k) {
    case LimitKind::JJ: return "JJ";
    case LimitKind::GG: return "GG";
    case LimitKind::GJ: return "GJ";
    case LimitKind::JL: return "JL";
    case LimitKind::YY: return "YY";
  }
  return "?";
}

LimitKind limit_kind_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(char(std::toupper(static_cast<unsigned char>(c))));
  if (u == "JJ") return LimitKind::JJ;
  if (u == "GG") return LimitKind::GG;
  if (u == "GJ") return LimitKind::GJ;
  if (u == "JL") return LimitKind::JL;
  if (u == "YY") return LimitKind::YY;
  throw Error(ErrorCode::invalid_input, "unknown limit kind '" + s + "' (JJ, GG, GJ, JL, YY)");
}

double LimitValue::term(const std::string& name) const {
  for (auto& [k, v] : term_breakdown)
    if (k == name) return v;
  throw Error(ErrorCode::invalid_input, "no term named " + name);
}

namespace {

struct Ctx {
  const HeatField& f;
  QuadratureSettings outer, inner;
  double inner_err = 0;  // largest inner error seen, per unit outer length
  double tail = 0;       // truncation bound

  explicit Ctx(const HeatField& hf) : f(hf), outer(hf.quadrature()), inner(hf.quadrature().tighter(10.0)) {}

  double chi0(double u) const { return f.profile().chi(u); }

  std::vector<double> kinks(std::vector<double> extra) const {
    for (double b : f.profile().breakpoints()) extra.push_back(b);
    return extra;
  }

  // Extra split points around centres where an integrand changes over a
  // length sd (a smoothed jump or kink). Without them Gauss-Kronrod can step
  // over a narrow transition and report a small error anyway.
  static std::vector<double> around(std::vector<double> cuts, const std::vector<double>& centres, double sd) {
    for (double c : centres)
      for (double k : {0.5, 2.0, 6.0}) {
        cuts.push_back(c - k * sd);
        cuts.push_back(c + k * sd);
      }
    return cuts;
  }

  template <class F>
  QuadResult line(F&& g, double a, double b, std::vector<double> cuts) {
    return integrate_split(g, a, b, std::move(cuts), outer);
  }

  template <class F>
  double inner_line(F&& g, double a, double b, std::vector<double> cuts) {
    auto r = integrate_split(g, a, b, std::move(cuts), inner);
    inner_err = std::max(inner_err, r.error);
    return r.value;
  }

  // time integral over [0, m] in r = m - w^2; removes sqrt singularities at r = m
  template <class F>
  QuadResult time_sqrt(F&& g, double m) {
    if (m <= 0) return {};
    auto h = [&](double w) { return 2.0 * w * g(m - w * w); };
    // the integrand carries inner quadrature noise, so the outer target
    // cannot be tighter than that noise
    double err = 0, l1 = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(h, 0.0, std::sqrt(m), outer.max_depth,
                                                                             outer.rel_tol, &err, &l1);
    double noise = inner_err * 2.0 * m;
    double target = std::max({outer.abs_tol, outer.rel_tol * l1, noise});
    if (!std::isfinite(v) || err > 10.0 * target)
      throw QuadratureError("time quadrature missed tolerance on [0, " + std::to_string(m) + "]: error " +
                                std::to_string(err),
                            v, err);
    return {v, err + noise};
  }
};

// Gaussian-tail truncation bound for int_{R}^inf of a Brownian tail probability
// against chi <= 1/4, with R at cutoff standard deviations.
double tail_bound(double sd, double cutoff) {
  return 0.25 * sd * std::exp(-0.5 * cutoff * cutoff);
}

LimitValue finish(std::vector<std::pair<std::string, QuadResult>> parts, double tail) {
  LimitValue v;
  double err = tail;
  for (auto& [name, r] : parts) {
    v.term_breakdown.push_back({name, r.value});
    err += r.error;
  }
  double sum = 0;
  for (auto& [name, r] : v.term_breakdown) sum += r;
  v.value = sum;
  v.error_estimate = err;
  return v;
}

void check_times(double s, double t) {
  if (!(s >= 0) || !(t >= 0)) throw Error(ErrorCode::invalid_time, "covariance times must be >= 0");
}

}  // namespace

LimitValue cov_current_current(const HeatField& f, double u1, double s, double u2, double t) {
  check_times(s, t);
  if (u1 > u2) {
    std::swap(u1, u2);
    std::swap(s, t);
  }
  if (s == 0 || t == 0)
    return finish({{"static_left", {}}, {"static_middle", {}}, {"static_right", {}}, {"dynamic", {}}}, 0);
  Ctx c(f);
  double sd = std::sqrt(2.0 * std::max(s, t));
  double L = u1 - c.outer.cutoff * sd, R = u2 + c.outer.cutoff * sd;
  auto k = c.kinks({});
  auto a1 = c.line([&](double u) { return bm_tail_ge(s, u1 - u) * bm_tail_ge(t, u2 - u) * c.chi0(u); }, L, u1, k);
  auto a2 = c.line([&](double u) { return -bm_tail_le(s, u1 - u) * bm_tail_ge(t, u2 - u) * c.chi0(u); }, u1, u2, k);
  auto a3 = c.line([&](double u) { return bm_tail_le(s, u1 - u) * bm_tail_le(t, u2 - u) * c.chi0(u); }, u2, R, k);

  // 2 int_0^m dr p_{s+t-2r}(u1,u2) E[chi(rho_r(c + sigma Z))]: the product of
  // the two kernels in u is a Gaussian in u times p_{s+t-2r}(u1 - u2)
  double m = std::min(s, t);
  double cut = c.outer.cutoff;
  auto dyn = c.time_sqrt(
      [&](double r) {
        double va = 2.0 * (s - r), vb = 2.0 * (t - r);
        double v = va + vb;
        if (v <= 0) return 0.0;
        double d = u1 - u2;
        double pk = std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
        if (pk == 0.0) return 0.0;
        double ctr = (u1 * vb + u2 * va) / v;
        double sig = std::sqrt(va * vb / v);
        double e;
        if (sig < 1e-12) {
          e = f.chi(r, ctr);
        } else {
          e = c.inner_line([&](double z) { return std_normal_pdf(z) * f.chi(r, ctr + sig * z); }, -cut, cut, {});
        }
        return 2.0 * pk * e;
      },
      m);
  double tail = 2.0 * tail_bound(sd, cut);
  return finish({{"static_left", a1}, {"static_middle", a2}, {"static_right", a3}, {"dynamic", dyn}}, tail);
}

LimitValue cov_current_jaralandim(const HeatField& f, double u, double s, double t) {
  check_times(s, t);
  if (s > t) std::swap(s, t);
  if (s == 0) return finish({{"static_right", {}}, {"static_left", {}}, {"dynamic", {}}}, 0);
  Ctx c(f);
  double cut = c.outer.cutoff;
  double sd = std::sqrt(2.0 * t);
  std::vector<double> k;
  for (double b : f.profile().breakpoints()) k.push_back(b - u);
  // profile evaluated at v + u, the sign that makes the v-integrals line up
  // with the current at site u
  auto b1 = c.line([&](double v) { return c.chi0(v + u) * bm_tail_ge(s, v) * bm_tail_ge(t, v); }, 0.0, cut * sd, k);
  auto b2 = c.line([&](double v) { return c.chi0(v + u) * bm_tail_le(s, v) * bm_tail_le(t, v); }, -cut * sd, 0.0, k);
  auto dyn = c.time_sqrt(
      [&](double r) {
        double a = s - r, b = t - r;
        if (a <= 0) return 2.0 * heat_kernel(b, 0.0, 0.0) * f.chi(r, u);
        double w = cut * std::sqrt(2.0 * a);
        return 2.0 * c.inner_line(
                         [&](double v) {
                           return f.chi(r, v + u) * heat_kernel(b, 0.0, v) * heat_kernel(a, 0.0, v);
                         },
                         -w, w, {});
      },
      s);
  return finish({{"static_right", b1}, {"static_left", b2}, {"dynamic", dyn}}, 2.0 * tail_bound(sd, cut));
}

LimitValue cov_occupation_occupation(const HeatField& f, double u1, double s, double u2, double t) {
  check_times(s, t);
  if (s == 0 || t == 0) return finish({{"static_u2_first", {}}, {"static_u1_first", {}}, {"source", {}}}, 0);
  Ctx c(f);
  double d = u1 - u2;
  double m = std::min(s, t);
  // r2 < r1: chi at the earlier point (r2, u2); r1 < r2: chi at (r1, u1)
  auto A = c.time_sqrt([&](double r) { return f.chi(r, u2) * integrated_kernel(s - r, d); }, m);
  auto B = c.time_sqrt([&](double r) { return f.chi(r, u1) * integrated_kernel(t - r, d); }, m);
  QuadResult src;
  if (!f.profile().is_constant()) {
    double cut = c.outer.cutoff;
    double sd = std::sqrt(2.0 * std::max(s, t));
    double L = std::min(u1, u2) - cut * sd, R = std::max(u1, u2) + cut * sd;
    src = c.time_sqrt(
        [&](double tau) {
          return -c.inner_line(
              [&](double u) {
                return f.source_term(tau, u) * integrated_kernel(s - tau, u - u1) * integrated_kernel(t - tau, u - u2);
              },
              L, R, c.kinks({u1, u2}));
        },
        m);
  }
  return finish({{"static_u2_first", A}, {"static_u1_first", B}, {"source", src}}, 0.0);
}

LimitValue cov_occupation_current(const HeatField& f, double u1, double s, double u2, double t) {
  check_times(s, t);
  const double b = u1, theta = s;  // occupation
  const double a = u2, sigma = t;  // current
  if (theta == 0 || sigma == 0)
    return finish({{"term1", {}}, {"term2", {}}, {"term3", {}}, {"term4", {}}}, 0);
  Ctx c(f);
  double cut = c.outer.cutoff;
  double sd = std::sqrt(2.0 * std::max(s, t));
  double R = std::max(a, b) + cut * sd;
  double L = std::min(a, b) - cut * sd;
  QuadResult T1, T3;
  if (theta > sigma)
    T1 = c.line([&](double u) { return f.chi(sigma, u) * integrated_kernel(theta - sigma, u - b); }, a, R,
                c.kinks({b}));
  double m = std::min(theta, sigma);
  auto T2 = c.time_sqrt([&](double r) { return bm_tail_ge(sigma - r, a - b) * f.chi(r, b); }, m);
  if (!f.profile().is_constant()) {
    T3 = c.time_sqrt(
        [&](double tau) {
          return -c.inner_line(
              [&](double u) {
                return bm_tail_ge(sigma - tau, a - u) * f.source_term(tau, u) * integrated_kernel(theta - tau, u - b);
              },
              L, R, Ctx::around(c.kinks({a, b}), {a}, std::sqrt(2.0 * (sigma - tau))));
        },
        m);
  }
  auto T4 = c.line([&](double u) { return -c.chi0(u) * integrated_kernel(theta, u - b); }, a, R, c.kinks({b}));
  return finish({{"term1", T1}, {"term2", T2}, {"term3", T3}, {"term4", T4}}, 2.0 * tail_bound(sd, cut));
}

LimitValue cov_density_field(const HeatField& f, const TestFunction& H, const TestFunction& G, double s, double t) {
  check_times(s, t);
  if (s > t) throw Error(ErrorCode::invalid_time, "density-field covariance expects s <= t");
  LimitValue out;
  if (H.empty() || G.empty()) {
    out.term_breakdown = {{"initial", 0.0}, {"gradient", 0.0}};
    return out;
  }
  Ctx c(f);
  double cut = c.outer.cutoff;
  double sd = std::sqrt(2.0 * std::max(t, 1e-300));
  double L = std::min(H.support_lo(), G.support_lo()) - cut * sd;
  double R = std::max(H.support_hi(), G.support_hi()) + cut * sd;
  auto cuts = H.breakpoints();
  for (double x : G.breakpoints()) cuts.push_back(x);
  cuts = c.kinks(cuts);
  auto hb = H.breakpoints(), gb = G.breakpoints();
  // split points resolving T_a H and T_b G near their breakpoints
  auto local = [&](double a, double b) {
    auto k = Ctx::around(cuts, hb, std::sqrt(2.0 * a));
    return Ctx::around(k, gb, std::sqrt(2.0 * b));
  };

  // gradient form: int T_t H T_s G chi_0 + 2 int_0^s int grad T_{t-r} H grad T_{s-r} G chi_r
  auto init = c.line([&](double u) { return H.semigroup(t, u) * G.semigroup(s, u) * c.chi0(u); }, L, R, local(t, s));
  QuadResult grad;
  if (s > 0)
    grad = c.time_sqrt(
        [&](double r) {
          return 2.0 * c.inner_line(
                           [&](double u) {
                             return H.semigroup_gradient(t - r, u) * G.semigroup_gradient(s - r, u) * f.chi(r, u);
                           },
                           L, R, local(t - r, s - r));
        },
        s);
  // source form: int T_{t-s} H G chi_s - int_0^s int T_{t-r} H T_{s-r} G S_r
  c.inner_err = 0;
  auto stat = c.line([&](double u) { return H.semigroup(t - s, u) * G(u) * f.chi(s, u); }, L, R, local(t - s, 0.0));
  QuadResult src;
  if (s > 0 && !f.profile().is_constant())
    src = c.time_sqrt(
        [&](double r) {
          return -c.inner_line(
              [&](double u) { return H.semigroup(t - r, u) * G.semigroup(s - r, u) * f.source_term(r, u); }, L, R,
              local(t - r, s - r));
        },
        s);
  out = finish({{"initial", init}, {"gradient", grad}}, 0.0);
  out.form1 = out.value;
  out.form0 = stat.value + src.value;
  out.form_difference = out.form1 - out.form0;
  out.error_estimate += stat.error + src.error;
  return out;
}

LimitValue evaluate(const LimitRequest& req) {
  HeatField f(req.profile, 1, req.quad);
  switch (req.kind) {
    case LimitKind::JJ: return cov_current_current(f, req.u1, req.s, req.u2, req.t);
    case LimitKind::GG: return cov_occupation_occupation(f, req.u1, req.s, req.u2, req.t);
    case LimitKind::GJ: return cov_occupation_current(f, req.u1, req.s, req.u2, req.t);
    case LimitKind::JL: return cov_current_jaralandim(f, req.u1, req.s, req.t);
    case LimitKind::YY: return cov_density_field(f, req.H, req.G, req.s, req.t);
  }
  throw Error(ErrorCode::invalid_input, "unknown limit kind");
}

}  // namespace ssep
