#pragma once

#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "ssep/profile.hpp"
#include "ssep/quadrature.hpp"

namespace ssep {

// Transition kernel q_t(k) = e^{-z} I_k(z), z = 2 n^2 t, of the continuous-time
// simple random walk with total jump rate 2n^2. Stored for k = 0..size-1 and
// truncated where q < 1e-14; `tail` is the discarded two-sided mass.
struct DiscreteKernel {
  std::vector<double> w;
  double tail = 0;
  bool gaussian = false;  // local-CLT fallback was used

  double operator[](long k) const {
    std::size_t a = std::size_t(k < 0 ? -k : k);
    return a < w.size() ? w[a] : 0.0;
  }
};

// Above this Bessel argument the kernel switches to the Gaussian local CLT.
inline constexpr double kBesselGaussianSwitch = 1e7;
inline constexpr double kKernelCut = 1e-14;
inline constexpr double kCacheTolerance = 1e-10;

DiscreteKernel random_walk_kernel(double z);

class HeatField {
 public:
  HeatField(Profile profile, long n, QuadratureSettings quad = {});

  const Profile& profile() const { return profile_; }
  long n() const { return n_; }
  const QuadratureSettings& quadrature() const { return quad_; }

  // rho_t^n(x); err (optional) receives the truncated kernel mass bound
  double discrete_density(long x, double t, double* err = nullptr) const;
  // sum_y a_y rho_t^n(y)
  double discrete_linear(const std::vector<std::pair<long, double>>& weights, double t) const;
  // int_0^t rho_s^n(x) ds
  QuadResult discrete_density_time_integral(long x, double t) const;
  // int_0^t sum_y a_y rho_s^n(y) ds
  QuadResult discrete_linear_time_integral(const std::vector<std::pair<long, double>>& weights, double t) const;
  // E[J_{x,x+1}(t)] = n^2 int_0^t (rho_s^n(x) - rho_s^n(x+1)) ds
  QuadResult discrete_current_mean(long x, double t) const;

  double continuum_density(double t, double u) const;
  double continuum_gradient(double t, double u) const;
  double chi(double t, double u) const {
    double r = continuum_density(t, u);
    return r * (1.0 - r);
  }
  // d_t chi - Lap chi = 2 (d_u rho)^2
  double source_term(double t, double u) const {
    double g = continuum_gradient(t, u);
    return 2.0 * g * g;
  }

  // Bicubic Hermite cache of rho on [t_lo, t_hi] x [u_lo, u_hi]. Nodes store
  // rho, rho_u, rho_t = rho_uu and rho_tu = rho_uuu. Returns the largest
  // deviation from direct evaluation over cell midpoints. A grid whose
  // deviation exceeds kCacheTolerance is discarded and reads stay direct.
  double build_cache(double t_lo, double t_hi, double u_lo, double u_hi, double h_t, double h_u);
  void set_cache_bypass(bool bypass) { bypass_ = bypass; }
  bool cache_active() const { return cache_ && !bypass_; }

  // columns t,u,rho,drho_du
  void export_csv(std::ostream& os, const std::vector<double>& ts, const std::vector<double>& us) const;

 private:
  struct Cache;
  double direct_density(double t, double u) const;
  double direct_gradient(double t, double u) const;
  // E[rho0(u + sigma Z) w(Z)]
  template <class W>
  double gaussian_moment(double u, double sigma, W&& weight) const;
  bool cache_lookup(double t, double u, double* rho, double* grad) const;

  Profile profile_;
  long n_;
  QuadratureSettings quad_;
  QuadratureSettings inner_;
  std::shared_ptr<const Cache> cache_;
  bool bypass_ = false;
};

}  // namespace ssep
