#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssep/mean_field.hpp"
#include "ssep/profile.hpp"
#include "ssep/test_function.hpp"

namespace ssep {

// Sites x_lo..x_hi (inclusive), edges (x, x+1) for x in [x_lo, x_hi - 1].
// Closed boundary: no clocks leave the window.
struct LatticeWindow {
  long n = 1;
  long x_lo = 0;
  long x_hi = 0;
  double margin_factor = 1.0;
  // optional margin bookkeeping: observed site range and horizon
  std::optional<long> observed_lo, observed_hi;
  double horizon = 0;
  // the window is the whole (closed) system, as in exact small-system
  // comparisons; the margin rule does not apply
  bool finite_system = false;

  static LatticeWindow closed_system(long n, long x_lo, long x_hi);

  long sites() const { return x_hi - x_lo + 1; }
  long edges() const { return x_hi - x_lo; }
  bool contains(long x) const { return x >= x_lo && x <= x_hi; }

  // margin_factor * 6 * n * sqrt(2T), rounded up
  static long required_margin(long n, double T, double margin_factor);
  // smallest window satisfying the margin rule around [obs_lo, obs_hi]
  static LatticeWindow around(long n, long obs_lo, long obs_hi, double T, double margin_factor = 1.0);

  void validate() const;
  // throws window-too-small when x violates the margin rule for horizon T
  void check_margin(long x, double T) const;
};

struct Configuration {
  LatticeWindow window;
  std::vector<std::uint8_t> occ;  // occ[x - x_lo]
  double time = 0;

  int at(long x) const { return occ[std::size_t(x - window.x_lo)]; }
  long particles() const;
};

struct ObservableSpec {
  enum class Kind { current, occupation, density_field, kv_block };
  Kind kind = Kind::current;
  std::string id;
  long site = 0;  // bond (site, site+1) for currents; block start for kv_block
  std::optional<double> u;  // macroscopic location; resolved to floor(u n) by resolve()
  bool centred = true;
  TestFunction H;        // density_field
  long block_length = 1;  // kv_block
  std::vector<double> output_times;

  static ObservableSpec current(long bond, std::vector<double> times, std::string id = {});
  static ObservableSpec occupation(long x, std::vector<double> times, bool centred = true, std::string id = {});
  static ObservableSpec density_field(TestFunction H, std::vector<double> times, std::string id = {});
  static ObservableSpec kv_block(long length, std::vector<double> times, long start = 0, std::string id = {});

  void validate() const;
  ObservableSpec resolve(long n) const;
  // sites whose occupancy the observable reads
  std::pair<long, long> site_range(long n) const;
};

std::string kind_name(ObservableSpec::Kind k);

// A validated spec with its deterministic centring precomputed at each output time.
struct Observable {
  ObservableSpec spec;
  long n = 1;
  std::vector<double> centring;
  double centring_error = 0;
};

// Needs the field for centring; a null field is allowed when the spec is uncentred.
Observable make_observable(const ObservableSpec& spec, const HeatField* field, long n);

struct ObservableSeries {
  std::string id;
  ObservableSpec::Kind kind;
  long site = 0;
  std::vector<double> times;
  std::vector<double> raw;
  std::vector<double> value;  // raw minus centring when centred
  std::vector<double> qv;     // currents: int_0^t (eta(x) - eta(x+1))^2 ds
};

struct TrajectorySample {
  long n = 1;
  std::vector<ObservableSeries> series;
  std::uint64_t event_count = 0;
  std::uint64_t rng_seed = 0;
  std::uint64_t boundary_touches = 0;

  const ObservableSeries* find(ObservableSpec::Kind kind, long site) const;
  const ObservableSeries* find(const std::string& id) const;
};

Configuration sample_initial_configuration(const Profile& profile, const LatticeWindow& window, std::uint64_t seed);

// Runs the stirring dynamics on [config.time, config.time + T]; advances config.
TrajectorySample evolve(Configuration& config, double T, const std::vector<Observable>& observables,
                        std::uint64_t seed);

struct MartingaleSeries {
  std::vector<double> times;
  std::vector<double> M;
  std::vector<double> qv_bound;  // n^2 int (eta(x) - eta(x+1))^2 ds
};

MartingaleSeries martingale_decomposition(const TrajectorySample& traj, long bond);

}  // namespace ssep
