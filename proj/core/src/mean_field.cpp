#include "ssep/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ssep/error.hpp"
#include "ssep/special.hpp"

namespace ssep {

DiscreteKernel random_walk_kernel(double z) {
  DiscreteKernel k;
  if (!(z >= 0)) throw Error(ErrorCode::invalid_time, "kernel argument must be >= 0");
  if (z == 0) {
    k.w = {1.0};
    return k;
  }
  std::vector<double> b;
  if (z > kBesselGaussianSwitch) {
    k.gaussian = true;
    std::size_t N = std::size_t(std::ceil(std::sqrt(2.0 * z * 75.0))) + 2;
    b.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) b[j] = std::exp(-double(j) * double(j) / (2.0 * z));
  } else {
    // Miller backward recurrence I_{k-1} = (2k/z) I_k + I_{k+1}, normalised by
    // I_0 + 2 sum_k I_k = e^z.
    std::size_t N = std::size_t(12.0 * std::sqrt(z) + 40.0);
    b.assign(N + 2, 0.0);
    b[N] = 1e-30;
    for (std::size_t j = N; j >= 1; --j) {
      b[j - 1] = (2.0 * double(j) / z) * b[j] + b[j + 1];
      if (b[j - 1] > 1e250)
        for (std::size_t i = j - 1; i <= N; ++i) b[i] *= 1e-250;
    }
    b.pop_back();
  }
  double s = 0;
  for (std::size_t j = b.size(); j-- > 1;) s += b[j];
  s = b[0] + 2.0 * s;
  for (auto& v : b) v /= s;
  std::size_t K = b.size();
  while (K > 1 && b[K - 1] < kKernelCut) --K;
  double tail = 0;
  for (std::size_t j = b.size(); j-- > K;) tail += b[j];
  k.tail = 2.0 * tail;
  b.resize(K);
  k.w = std::move(b);
  return k;
}

struct HeatField::Cache {
  double t_lo, t_hi, u_lo, u_hi, ht, hu;
  std::size_t nt, nu;
  // per node: rho, rho_u, rho_uu, rho_uuu, rho_uuuu
  std::vector<double> d;
  const double* node(std::size_t i, std::size_t j) const { return &d[5 * (i * nu + j)]; }
};

HeatField::HeatField(Profile profile, long n, QuadratureSettings quad)
    : profile_(std::move(profile)), n_(n), quad_(quad) {
  if (n_ < 1) throw Error(ErrorCode::invalid_input, "n must be a positive integer");
  quad_.validate();
  inner_ = quad_;
  inner_.rel_tol = std::min(quad_.rel_tol, 1e-12);
  inner_.abs_tol = std::min(quad_.abs_tol, 1e-15);
  inner_.max_depth = std::max(quad_.max_depth, 20u);
}

double HeatField::discrete_density(long x, double t, double* err) const {
  if (t < 0) throw Error(ErrorCode::invalid_time, "discrete density needs t >= 0");
  if (profile_.is_constant()) {
    if (err) *err = 0;
    return profile_.constant_value();
  }
  double nn = double(n_);
  if (t == 0) {
    if (err) *err = 0;
    return profile_(double(x) / nn);
  }
  auto k = random_walk_kernel(2.0 * nn * nn * t);
  double acc = k.w[0] * profile_(double(x) / nn);
  for (std::size_t j = 1; j < k.w.size(); ++j)
    acc += k.w[j] * (profile_(double(x + long(j)) / nn) + profile_(double(x - long(j)) / nn));
  if (err) *err = k.tail;
  return acc;
}

double HeatField::discrete_linear(const std::vector<std::pair<long, double>>& weights, double t) const {
  if (t < 0) throw Error(ErrorCode::invalid_time, "discrete density needs t >= 0");
  double tot = 0;
  if (profile_.is_constant()) {
    for (auto& [x, a] : weights) tot += a;
    return tot * profile_.constant_value();
  }
  double nn = double(n_);
  if (t == 0) {
    for (auto& [x, a] : weights) tot += a * profile_(double(x) / nn);
    return tot;
  }
  auto k = random_walk_kernel(2.0 * nn * nn * t);
  // sum_j w_j sum_y a_y (rho0((y+j)/n) + rho0((y-j)/n)); differences of
  // neighbouring sites are formed before weighting to limit cancellation
  for (std::size_t j = 0; j < k.w.size(); ++j) {
    double inner = 0;
    for (auto& [x, a] : weights) {
      inner += a * profile_(double(x + long(j)) / nn);
      if (j > 0) inner += a * profile_(double(x - long(j)) / nn);
    }
    tot += k.w[j] * inner;
  }
  return tot;
}

QuadResult HeatField::discrete_linear_time_integral(const std::vector<std::pair<long, double>>& weights,
                                                    double t) const {
  if (t < 0) throw Error(ErrorCode::invalid_time, "time integral needs t >= 0");
  if (t == 0) return {};
  if (profile_.is_constant()) {
    double tot = 0;
    for (auto& [x, a] : weights) tot += a;
    return {tot * profile_.constant_value() * t, 0.0};
  }
  auto f = [&](double s) { return discrete_linear(weights, s); };
  // the kernel moves on the scale 1/n^2; give the adaptive rule a head start
  double nn = double(n_);
  std::vector<double> cuts;
  for (double c = 1.0 / (nn * nn); c < t; c *= 8.0) cuts.push_back(c);
  return integrate_split(f, 0.0, t, cuts, quad_);
}

QuadResult HeatField::discrete_density_time_integral(long x, double t) const {
  return discrete_linear_time_integral({{x, 1.0}}, t);
}

QuadResult HeatField::discrete_current_mean(long x, double t) const {
  double nn = double(n_);
  return discrete_linear_time_integral({{x, nn * nn}, {x + 1, -nn * nn}}, t);
}

template <class W>
double HeatField::gaussian_moment(double u, double sigma, W&& weight) const {
  double C = quad_.cutoff;
  std::vector<double> cuts;
  for (double b : profile_.breakpoints()) cuts.push_back((b - u) / sigma);
  auto f = [&](double z) { return std_normal_pdf(z) * weight(z) * profile_(u + sigma * z); };
  return integrate_split(f, -C, C, cuts, inner_).value;
}

double HeatField::direct_density(double t, double u) const {
  if (t < 0) throw Error(ErrorCode::invalid_time, "continuum density needs t >= 0");
  if (profile_.is_constant()) return profile_.constant_value();
  if (t == 0) return profile_(u);
  return gaussian_moment(u, std::sqrt(2.0 * t), [](double) { return 1.0; });
}

double HeatField::direct_gradient(double t, double u) const {
  if (t < 0) throw Error(ErrorCode::invalid_time, "continuum gradient needs t >= 0");
  if (profile_.is_constant()) return 0.0;
  if (t == 0) return profile_.derivative(u);
  double sig = std::sqrt(2.0 * t);
  if (sig < 1e-3) {
    // z/sigma weights lose digits for tiny sigma; integrate rho0' instead
    double C = quad_.cutoff;
    std::vector<double> cuts;
    for (double b : profile_.breakpoints()) cuts.push_back((b - u) / sig);
    auto f = [&](double z) { return std_normal_pdf(z) * profile_.derivative(u + sig * z); };
    return integrate_split(f, -C, C, cuts, inner_).value;
  }
  return gaussian_moment(u, sig, [sig](double z) { return z / sig; });
}

namespace {
// Hermite basis on [0,1]
inline void hermite(double a, double h[4], double dh[4]) {
  double a2 = a * a, a3 = a2 * a;
  h[0] = 2 * a3 - 3 * a2 + 1;
  h[1] = -2 * a3 + 3 * a2;
  h[2] = a3 - 2 * a2 + a;
  h[3] = a3 - a2;
  dh[0] = 6 * a2 - 6 * a;
  dh[1] = -6 * a2 + 6 * a;
  dh[2] = 3 * a2 - 4 * a + 1;
  dh[3] = 3 * a2 - 2 * a;
}
}  // namespace

bool HeatField::cache_lookup(double t, double u, double* rho, double* grad) const {
  if (!cache_ || bypass_) return false;
  const Cache& c = *cache_;
  if (t < c.t_lo || t > c.t_hi || u < c.u_lo || u > c.u_hi) return false;
  std::size_t i = std::min(std::size_t((t - c.t_lo) / c.ht), c.nt - 2);
  std::size_t j = std::min(std::size_t((u - c.u_lo) / c.hu), c.nu - 2);
  double a = (t - (c.t_lo + double(i) * c.ht)) / c.ht;
  double b = (u - (c.u_lo + double(j) * c.hu)) / c.hu;
  double ha[4], dha[4], hb[4], dhb[4];
  hermite(a, ha, dha);
  hermite(b, hb, dhb);
  // field f with f_u = d[k+1], f_t = d[k+2], f_tu = d[k+3] for offset k
  auto eval = [&](int k, bool du) {
    double acc = 0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const double* nd = c.node(i + std::size_t(p), j + std::size_t(q));
        const double* B = du ? dhb : hb;
        double sc = du ? 1.0 / c.hu : 1.0;
        acc += sc * (ha[p] * B[q] * nd[k] + ha[p + 2] * c.ht * B[q] * nd[k + 2] + ha[p] * B[q + 2] * c.hu * nd[k + 1] +
                     ha[p + 2] * c.ht * B[q + 2] * c.hu * nd[k + 3]);
      }
    return acc;
  };
  if (rho) *rho = eval(0, false);
  if (grad) *grad = eval(1, false);
  return true;
}

double HeatField::continuum_density(double t, double u) const {
  double r;
  if (cache_lookup(t, u, &r, nullptr)) return r;
  return direct_density(t, u);
}

double HeatField::continuum_gradient(double t, double u) const {
  double g;
  if (cache_lookup(t, u, nullptr, &g)) return g;
  return direct_gradient(t, u);
}

double HeatField::build_cache(double t_lo, double t_hi, double u_lo, double u_hi, double h_t, double h_u) {
  if (!(t_lo > 0) || !(t_hi > t_lo) || !(u_hi > u_lo) || !(h_t > 0) || !(h_u > 0))
    throw Error(ErrorCode::invalid_input, "cache grid needs 0 < t_lo < t_hi, u_lo < u_hi, positive steps");
  auto c = std::make_shared<Cache>();
  c->nt = std::size_t(std::ceil((t_hi - t_lo) / h_t)) + 1;
  c->nu = std::size_t(std::ceil((u_hi - u_lo) / h_u)) + 1;
  c->ht = (t_hi - t_lo) / double(c->nt - 1);
  c->hu = (u_hi - u_lo) / double(c->nu - 1);
  c->t_lo = t_lo;
  c->t_hi = t_hi;
  c->u_lo = u_lo;
  c->u_hi = u_hi;
  if (double(c->nt) * double(c->nu) > 4e6) throw Error(ErrorCode::resource_cap, "density cache grid too large");
  c->d.resize(5 * c->nt * c->nu);
  for (std::size_t i = 0; i < c->nt; ++i) {
    double t = t_lo + double(i) * c->ht;
    double sig = std::sqrt(2.0 * t);
    for (std::size_t j = 0; j < c->nu; ++j) {
      double u = u_lo + double(j) * c->hu;
      double* nd = &c->d[5 * (i * c->nu + j)];
      if (profile_.is_constant()) {
        nd[0] = profile_.constant_value();
        for (int k = 1; k < 5; ++k) nd[k] = 0;
        continue;
      }
      // d^k/du^k rho = E[rho0(u + sigma Z) He_k(Z)] / sigma^k
      nd[0] = gaussian_moment(u, sig, [](double) { return 1.0; });
      nd[1] = gaussian_moment(u, sig, [](double z) { return z; }) / sig;
      nd[2] = gaussian_moment(u, sig, [](double z) { return z * z - 1; }) / std::pow(sig, 2);
      nd[3] = gaussian_moment(u, sig, [](double z) { return z * z * z - 3 * z; }) / std::pow(sig, 3);
      nd[4] = gaussian_moment(u, sig, [](double z) { return z * z * z * z - 6 * z * z + 3; }) / std::pow(sig, 4);
    }
  }
  cache_ = c;
  bool was = bypass_;
  bypass_ = false;
  double worst = 0;
  std::size_t cells = (c->nt - 1) * (c->nu - 1);
  std::size_t stride = std::max<std::size_t>(1, cells / 2000);
  for (std::size_t m = 0; m < cells; m += stride) {
    std::size_t i = m / (c->nu - 1), j = m % (c->nu - 1);
    double t = t_lo + (double(i) + 0.5) * c->ht;
    double u = u_lo + (double(j) + 0.5) * c->hu;
    double r = 0;
    cache_lookup(t, u, &r, nullptr);
    worst = std::max(worst, std::abs(r - direct_density(t, u)));
  }
  bypass_ = was;
  // a cache that cannot reproduce direct evaluation is dropped
  if (!(worst <= kCacheTolerance)) cache_.reset();
  return worst;
}

void HeatField::export_csv(std::ostream& os, const std::vector<double>& ts, const std::vector<double>& us) const {
  os << "t,u,rho,drho_du\n";
  char buf[128];
  for (double t : ts)
    for (double u : us) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, u, continuum_density(t, u),
                    continuum_gradient(t, u));
      os << buf;
    }
}

}  // namespace ssep
