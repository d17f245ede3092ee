#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssep/limit_gaussian.hpp"
#include "ssep/profile.hpp"
#include "ssep/quadrature.hpp"
#include "ssep/stirring.hpp"

namespace ssep {

// Streaming count / mean / co-moment accumulator with Chan's pairwise merge.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim = 0) : mean_(dim, 0.0), m2_(dim * dim, 0.0) {}

  void add(const std::vector<double>& x);
  void merge(const MomentAccumulator& o);

  std::size_t dim() const { return mean_.size(); }
  double count() const { return n_; }
  double mean(std::size_t i) const { return mean_[i]; }
  // sample covariance (divisor n - 1)
  double covariance(std::size_t i, std::size_t j) const;

 private:
  double n_ = 0;
  std::vector<double> mean_, m2_;
};

// Comparison of the ensemble against a limit formula.
struct LimitTarget {
  LimitRequest request;
  std::string obs_i, obs_j;  // observable ids
  double s = 0, t = 0;       // output times of obs_i and obs_j
};

struct ExperimentConfig {
  Profile profile = Profile::constant(0.5);
  long n = 100;
  std::vector<long> n_list;  // scaling studies; empty means {n}
  double T = 1.0;
  long replicas = 1000;
  std::uint64_t seed = 1;
  double margin_factor = 1.0;
  std::vector<ObservableSpec> observables;
  QuadratureSettings quad;
  std::vector<LimitTarget> targets;
  double max_events = 2e12;  // resource cap on R * edges * n^2 * T
  unsigned threads = 0;      // 0 = hardware concurrency

  void validate() const;
};

struct CovarianceEntry {
  std::string obs_i, obs_j;
  double s = 0, t = 0;
  double cov = 0, se = 0;
  std::size_t R = 0;
};

struct CovarianceReport {
  std::vector<CovarianceEntry> entries;
  const CovarianceEntry* find(const std::string& a, double s, const std::string& b, double t) const;
};

// One column per (observable, output time), normalised: currents by n^{-1/2},
// occupation times by n^{1/2}.
struct EnsembleResult {
  long n = 0;
  std::size_t replicas = 0;
  std::vector<std::string> column_obs;
  std::vector<double> column_time;
  std::vector<double> data;  // replicas x columns, row-major
  std::vector<double> qv;    // per column, currents only: max n^2 int (eta(x)-eta(x+1))^2 over replicas
  std::uint64_t events = 0;
  std::uint64_t boundary_touches = 0;
  LatticeWindow window;
  double centring_error = 0;
  CovarianceReport report;
  std::vector<double> means;

  std::size_t columns() const { return column_obs.size(); }
  double at(std::size_t r, std::size_t c) const { return data[r * columns() + c]; }
  long column(const std::string& obs, double t) const;
};

double normalisation(ObservableSpec::Kind kind, long n);

EnsembleResult run_ensemble(const ExperimentConfig& cfg);
EnsembleResult run_ensemble(const ExperimentConfig& cfg, long n);

// Runs fn(i) for i in [0, count) across `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Sample covariance of two columns with SE = std(product deviations) / sqrt(R).
CovarianceEntry column_covariance(const std::vector<double>& x, const std::vector<double>& y);
CovarianceReport covariance_report(const EnsembleResult& e);

// Truncation self-check: reruns with doubled margin_factor and compares the
// covariance reports entry by entry.
struct MarginCheck {
  double max_z = 0;         // max |cov - cov_doubled| / sqrt(se^2 + se_doubled^2)
  double max_abs_diff = 0;
  std::size_t entries = 0;
};
MarginCheck margin_doubling_check(const ExperimentConfig& cfg, long n);

struct HurstFit {
  double slope = 0, slope_se = 0, intercept = 0;
  double hurst() const { return slope / 2.0; }
};

HurstFit hurst_fit(const std::vector<double>& t, const std::vector<double>& v);

struct BoundPoint {
  std::vector<double> coords;
  double estimate = 0;
  double se = 0;  // 0 for exact values
};

struct TrendFlag {
  std::size_t axis = 0;
  std::vector<double> fixed;  // other coordinates of the group
  double slope = 0, p_value = 1;
  bool growth = false;
};

struct BoundCheck {
  double C_fit = 0;
  std::vector<double> bounds, ratios;
  std::vector<bool> violation;
  std::vector<TrendFlag> trends;
  bool any_trend = false;
};

enum class FitMode { exact, noisy };

// `asymptotic_direction[a]` is +1 when the axis value grows toward the
// asymptotic regime (n, n^2 t) and -1 when it shrinks (epsilon). Violations
// are flagged against `C_claim` when positive.
BoundCheck bound_check(const std::vector<BoundPoint>& pts, const std::function<double(const std::vector<double>&)>& bound,
                       const std::vector<int>& asymptotic_direction, FitMode mode, double C_claim = 0);

struct KvRow {
  long n = 0, ell = 0;
  double eps = 0, eps_eff = 0, s = 0, t = 0;
  double estimate = 0, se = 0, bound = 0, ratio = 0;
};

// l = max(1, round(eps n)); bound uses eps_eff = l / n.
std::vector<KvRow> kv_experiment(const Profile& profile, const std::vector<long>& ns, const std::vector<double>& eps,
                                 const std::vector<std::pair<double, double>>& st, long replicas, std::uint64_t seed,
                                 unsigned threads = 0, double margin_factor = 1.0);

double kv_bound(double s, double t, double eps, long n);

struct Verdict {
  double mc = 0, se = 0, limit = 0, limit_error = 0;
  double z = 0, tolerance = 0;
  bool pass = false;
};

Verdict compare_mc_limit(double mc, double se, const LimitValue& target, double rel_slack = 0.15,
                         double abs_slack = 1e-3);

// Two-point function averaged over pairs x < y <= x + max_gap with x, y in [lo, hi]:
// mean of (eta(x) - rho_t^n(x)) (eta(y) - rho_t^n(y)).
struct PairAverage {
  long n = 0;
  double t = 0;
  double estimate = 0, se = 0;
  std::size_t pairs = 0, replicas = 0;
};

PairAverage pair_correlation_average(const Profile& profile, long n, double t, double u_lo, double u_hi,
                                     double max_gap_macro, long replicas, std::uint64_t seed, unsigned threads = 0,
                                     double margin_factor = 1.0);

}  // namespace ssep
