#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ssep/profile.hpp"

namespace ssep {

// Poisson mixture e^{t Q} v = sum_k Pois(k; lambda t) P^k v with P = I + Q / lambda.
// Several times share the same powers of P. `apply` maps v to P v.
struct UniformisationResult {
  std::vector<std::vector<double>> values;  // one per time
  std::vector<double> truncated_mass;       // Poisson tail dropped, per time
};

UniformisationResult uniformise(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                                const std::vector<double>& v0, double lambda, const std::vector<double>& times,
                                double tail_tol = 1e-12);

// Full state space of `sites` stirring sites (closed boundary), site i at
// lattice position x0 + i, edges swapping at rate n^2.
struct SmallSystem {
  int sites = 10;
  long n = 1;
  long x0 = 0;
  double tail_tol = 1e-12;

  static constexpr int kMaxSites = 16;
  std::size_t states() const { return std::size_t(1) << sites; }
  void validate() const;
};

struct EvolveReport {
  std::vector<double> dist;
  double renormalisation_delta = 0;
};

EvolveReport evolve_distribution(const SmallSystem& sys, const std::vector<double>& dist, double t);

// product Bernoulli(rho0((x0 + i)/n)) law on the full state space
std::vector<double> product_measure(const SmallSystem& sys, const Profile& profile);

// E[eta_t(i)] on the finite system, via its one-particle walk
std::vector<double> finite_density(const SmallSystem& sys, const Profile& profile, double t);

// E[prod_j prod_{i in sites[j]} (eta_{t_j}(i) - rho_{t_j}(i))], sites are indices 0..sites-1
double exact_correlation(const SmallSystem& sys, const Profile& profile, const std::vector<double>& times,
                         const std::vector<std::vector<int>>& site_lists);

// E[prod_i (eta_t(x_i) - rho_t(x_i) - eta_s(x_i) + rho_s(x_i))] for s <= t, expanded
// over the subsets of points read at time t
double increment_correlation(const SmallSystem& sys, const Profile& profile, double s, double t,
                             const std::vector<int>& sites);

// k labelled stirring particles on `sites` sites (closed boundary).
class LabelledSystem {
 public:
  static constexpr int kMaxSites = 24;
  LabelledSystem(int k, int sites, long n, std::size_t max_states = 4'000'000);

  int k() const { return k_; }
  int sites() const { return sites_; }
  long n() const { return n_; }
  std::size_t size() const { return states_.size() / std::size_t(k_); }

  // -1 when positions collide or leave the window
  long index(const std::vector<int>& pos) const;
  std::vector<int> state(std::size_t idx) const;

  void apply(const std::vector<double>& v, std::vector<double>& out) const;
  double uniform_rate() const { return 2.0 * k_ * double(n_) * double(n_); }

  // p_t^lex(x, y)
  double lex_transition(const std::vector<int>& x, const std::vector<int>& y, double t) const;
  // row p_t^lex(x, .) for several times
  std::vector<std::vector<double>> lex_row(const std::vector<int>& x, const std::vector<double>& times) const;

 private:
  int k_, sites_;
  long n_;
  std::vector<int> states_;      // flattened positions
  std::vector<long> index_;      // mixed radix -> state index
  std::vector<std::int32_t> nb_;  // 2k neighbours per state (self when no move)
};

struct GradientPoint {
  double t = 0, n2t = 0, sup = 0, scaled = 0;
};

struct GradientScan {
  int k = 1;
  long n = 1;
  int coordinate = 0;
  std::vector<GradientPoint> points;
  double fitted_constant = 0;  // max of scaled values
  double min_scaled = 0;
};

// sup_{x,y} |p_t(x,y) - p_t(x + e_i, y)| (n^2 t + 1)^{(k+1)/2}, exhaustive over x and y
GradientScan gradient_scan(const LabelledSystem& sys, const std::vector<double>& times, int coordinate);

struct TailEstimate {
  double t = 0, tail = 0, se = 0;
  std::size_t replicas = 0;
};

// Coupled (k+1)-particle process on Z with clocks of rate 2n^2 and fair coins.
// Returns P(tau > t) for each requested t.
std::vector<TailEstimate> coupling_tau_tail(int k, const std::vector<long>& start, int coordinate,
                                            const std::vector<double>& times, long n, std::size_t replicas,
                                            std::uint64_t seed);

// Marginal positions of X (drops particle 2) and Y (drops particle 1) at time t.
struct CouplingMarginals {
  std::vector<std::vector<long>> X, Y;  // one k-vector per replica
};
CouplingMarginals coupling_marginals(int k, const std::vector<long>& start, int coordinate, double t, long n,
                                     std::size_t replicas, std::uint64_t seed);

struct MeetingTail {
  double tail = 0;
  double boundary_mass = 0;
  long max_distance = 0;
};

// P(tau~ > t) for the difference walk (rate 4n^2) started at 1, absorbed at 0,
// with a sink at M. max_distance <= 0 picks M automatically.
MeetingTail meeting_time_oracle(double t, long n, long max_distance = 0);

// Closed form e^{-l}(I_0(l) + I_1(l)), l = 4 n^2 t, for cross-checks.
double meeting_time_closed_form(double t, long n);

}  // namespace ssep
