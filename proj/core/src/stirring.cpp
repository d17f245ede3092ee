#include "ssep/stirring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ssep/error.hpp"
#include "ssep/rng.hpp"

namespace ssep {

long LatticeWindow::required_margin(long n, double T, double margin_factor) {
  return long(std::ceil(margin_factor * 6.0 * double(n) * std::sqrt(2.0 * T)));
}

LatticeWindow LatticeWindow::around(long n, long obs_lo, long obs_hi, double T, double margin_factor) {
  if (margin_factor < 1.0) throw Error(ErrorCode::invalid_input, "margin_factor must be >= 1");
  long m = std::max(1L, required_margin(n, T, margin_factor));
  LatticeWindow w;
  w.n = n;
  w.x_lo = obs_lo - m;
  w.x_hi = obs_hi + m;
  w.margin_factor = margin_factor;
  w.observed_lo = obs_lo;
  w.observed_hi = obs_hi;
  w.horizon = T;
  return w;
}

void LatticeWindow::validate() const {
  if (n < 1) throw Error(ErrorCode::invalid_input, "n must be positive");
  if (!(x_lo < x_hi)) throw Error(ErrorCode::window_too_small, "window needs x_lo < x_hi");
  if (margin_factor < 1.0) throw Error(ErrorCode::invalid_input, "margin_factor must be >= 1");
  if (observed_lo) check_margin(*observed_lo, horizon);
  if (observed_hi) check_margin(*observed_hi, horizon);
}

LatticeWindow LatticeWindow::closed_system(long n, long x_lo, long x_hi) {
  LatticeWindow w;
  w.n = n;
  w.x_lo = x_lo;
  w.x_hi = x_hi;
  w.finite_system = true;
  w.validate();
  return w;
}

void LatticeWindow::check_margin(long x, double T) const {
  if (finite_system) {
    if (!contains(x)) throw Error(ErrorCode::window_too_small, "site " + std::to_string(x) + " outside the system");
    return;
  }
  long m = required_margin(n, T, margin_factor);
  if (x - x_lo < m || x_hi - x < m || x <= x_lo || x >= x_hi)
    throw Error(ErrorCode::window_too_small, "site " + std::to_string(x) + " is closer than " + std::to_string(m) +
                                                 " sites to the window boundary [" + std::to_string(x_lo) + ", " +
                                                 std::to_string(x_hi) + "]");
}

long Configuration::particles() const {
  long s = 0;
  for (auto v : occ) s += v;
  return s;
}

ObservableSpec ObservableSpec::current(long bond, std::vector<double> times, std::string id) {
  ObservableSpec s;
  s.kind = Kind::current;
  s.site = bond;
  s.output_times = std::move(times);
  s.id = id.empty() ? "J" + std::to_string(bond) : id;
  return s;
}

ObservableSpec ObservableSpec::occupation(long x, std::vector<double> times, bool centred, std::string id) {
  ObservableSpec s;
  s.kind = Kind::occupation;
  s.site = x;
  s.centred = centred;
  s.output_times = std::move(times);
  s.id = id.empty() ? "G" + std::to_string(x) : id;
  return s;
}

ObservableSpec ObservableSpec::density_field(TestFunction H, std::vector<double> times, std::string id) {
  ObservableSpec s;
  s.kind = Kind::density_field;
  s.H = std::move(H);
  s.output_times = std::move(times);
  s.id = id.empty() ? "Y" : id;
  return s;
}

ObservableSpec ObservableSpec::kv_block(long length, std::vector<double> times, long start, std::string id) {
  ObservableSpec s;
  s.kind = Kind::kv_block;
  s.block_length = length;
  s.site = start;
  s.output_times = std::move(times);
  s.id = id.empty() ? "KV" + std::to_string(length) : id;
  return s;
}

void ObservableSpec::validate() const {
  if (kind == Kind::kv_block && block_length < 1)
    throw Error(ErrorCode::invalid_input, "kv_block length must be >= 1");
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (!(output_times[i] >= 0)) throw Error(ErrorCode::invalid_time, "output times must be >= 0");
    if (i > 0 && output_times[i] < output_times[i - 1])
      throw Error(ErrorCode::invalid_input, "output times must be nondecreasing");
  }
}

ObservableSpec ObservableSpec::resolve(long n) const {
  ObservableSpec r = *this;
  if (u) r.site = long(std::floor(*u * double(n) + 1e-9));
  return r;
}

std::pair<long, long> ObservableSpec::site_range(long n) const {
  switch (kind) {
    case Kind::current: return {site, site + 1};
    case Kind::occupation: return {site, site};
    case Kind::kv_block: return {site, site + block_length - 1};
    case Kind::density_field: {
      if (H.empty()) return {0, 0};
      return {long(std::ceil(H.support_lo() * double(n))), long(std::floor(H.support_hi() * double(n)))};
    }
  }
  return {site, site};
}

std::string kind_name(ObservableSpec::Kind k) {
  switch (k) {
    case ObservableSpec::Kind::current: return "current";
    case ObservableSpec::Kind::occupation: return "occupation";
    case ObservableSpec::Kind::density_field: return "density_field";
    case ObservableSpec::Kind::kv_block: return "kv_block";
  }
  return "?";
}

namespace {

std::vector<std::pair<long, double>> density_weights(const ObservableSpec& s, long n) {
  std::vector<std::pair<long, double>> w;
  auto [lo, hi] = s.site_range(n);
  double scale = 1.0 / std::sqrt(double(n));
  for (long x = lo; x <= hi; ++x) {
    double h = s.H(double(x) / double(n));
    if (h != 0.0) w.push_back({x, h * scale});
  }
  return w;
}

std::vector<std::pair<long, double>> kv_weights(const ObservableSpec& s) {
  std::vector<std::pair<long, double>> w;
  double inv = 1.0 / double(s.block_length);
  w.push_back({s.site, 1.0 - inv});
  for (long y = s.site + 1; y < s.site + s.block_length; ++y) w.push_back({y, -inv});
  return w;
}

}  // namespace

Observable make_observable(const ObservableSpec& spec, const HeatField* field, long n) {
  spec.validate();
  Observable o;
  o.spec = spec;
  o.n = n;
  o.centring.assign(spec.output_times.size(), 0.0);
  if (!spec.centred) return o;
  if (spec.kind == ObservableSpec::Kind::kv_block && spec.block_length == 1) return o;
  if (!field) throw Error(ErrorCode::invalid_input, "centred observable '" + spec.id + "' needs a heat field");
  if (field->n() != n) throw Error(ErrorCode::invalid_input, "heat field n does not match observable n");
  for (std::size_t k = 0; k < spec.output_times.size(); ++k) {
    double t = spec.output_times[k];
    QuadResult r;
    switch (spec.kind) {
      case ObservableSpec::Kind::current: r = field->discrete_current_mean(spec.site, t); break;
      case ObservableSpec::Kind::occupation: r = field->discrete_density_time_integral(spec.site, t); break;
      case ObservableSpec::Kind::kv_block: r = field->discrete_linear_time_integral(kv_weights(spec), t); break;
      case ObservableSpec::Kind::density_field: r.value = field->discrete_linear(density_weights(spec, n), t); break;
    }
    o.centring[k] = r.value;
    o.centring_error = std::max(o.centring_error, r.error);
  }
  return o;
}

const ObservableSeries* TrajectorySample::find(ObservableSpec::Kind kind, long site) const {
  for (const auto& s : series)
    if (s.kind == kind && s.site == site) return &s;
  return nullptr;
}

const ObservableSeries* TrajectorySample::find(const std::string& id) const {
  for (const auto& s : series)
    if (s.id == id) return &s;
  return nullptr;
}

Configuration sample_initial_configuration(const Profile& profile, const LatticeWindow& window, std::uint64_t seed) {
  window.validate();
  Configuration c;
  c.window = window;
  c.occ.resize(std::size_t(window.sites()));
  Xoshiro256 rng(seed);
  for (long x = window.x_lo; x <= window.x_hi; ++x) {
    double p = profile(double(x) / double(window.n));
    if (!(p > 0 && p < 1)) throw Error(ErrorCode::invalid_profile, "profile left (0,1) at site " + std::to_string(x));
    c.occ[std::size_t(x - window.x_lo)] = rng.uniform() < p ? 1 : 0;
  }
  return c;
}

namespace {

// Integral of a function of a few occupancies, exact between events.
struct Tracked {
  enum Kind { block_sum, pair_diff } kind;
  long a;    // index into occ
  long len;  // block length
  double cur = 0, integral = 0, last = 0;

  double value(const std::uint8_t* occ) const {
    if (kind == pair_diff) return occ[a] != occ[a + 1] ? 1.0 : 0.0;
    long s = 0;
    for (long i = 0; i < len; ++i) s += occ[a + i];
    return double(s);
  }
  void flush(double t) {
    integral += cur * (t - last);
    last = t;
  }
};

struct EdgeHooks {
  std::vector<int> tracked;
  std::vector<int> currents;
  bool boundary = false;
};

class Engine {
 public:
  Engine(Configuration& cfg, const std::vector<Observable>& obs, double T) : cfg_(cfg), obs_(obs), T_(T) {
    const auto& w = cfg.window;
    E_ = w.edges();
    tag_of_.assign(std::size_t(E_), -1);
    occ_ = cfg.occ.data();
    auto idx = [&](long x) { return x - w.x_lo; };
    auto tag = [&](long e) -> EdgeHooks& {
      if (e < 0 || e >= E_) throw Error(ErrorCode::window_too_small, "observable touches the window boundary");
      if (tag_of_[std::size_t(e)] < 0) {
        tag_of_[std::size_t(e)] = int(tagged_.size());
        tagged_.push_back(e);
        hooks_.emplace_back();
      }
      return hooks_[std::size_t(tag_of_[std::size_t(e)])];
    };
    auto add_tracked = [&](Tracked::Kind k, long a, long len) {
      int id = int(tracked_.size());
      tracked_.push_back({k, a, len});
      tracked_.back().cur = tracked_.back().value(occ_);
      if (k == Tracked::pair_diff) {
        for (long e = a - 1; e <= a + 1; ++e) tag(e).tracked.push_back(id);
      } else {
        tag(a - 1).tracked.push_back(id);
        tag(a + len - 1).tracked.push_back(id);
      }
      return id;
    };
    for (const auto& o : obs_) {
      const auto& s = o.spec;
      Slots sl;
      switch (s.kind) {
        case ObservableSpec::Kind::current: {
          long e = idx(s.site);
          sl.cur = int(counts_.size());
          counts_.push_back(0);
          tag(e).currents.push_back(sl.cur);
          cur_edge_.push_back(e);
          sl.t1 = add_tracked(Tracked::pair_diff, e, 2);
          break;
        }
        case ObservableSpec::Kind::occupation: sl.t1 = add_tracked(Tracked::block_sum, idx(s.site), 1); break;
        case ObservableSpec::Kind::kv_block:
          sl.t1 = add_tracked(Tracked::block_sum, idx(s.site), 1);
          sl.t2 = add_tracked(Tracked::block_sum, idx(s.site), s.block_length);
          break;
        case ObservableSpec::Kind::density_field: {
          auto [lo, hi] = s.site_range(o.n);
          for (long x = lo; x <= hi; ++x) {
            double h = s.H(double(x) / double(o.n));
            if (h != 0.0) sl.weights.push_back({idx(x), h / std::sqrt(double(o.n))});
          }
          break;
        }
      }
      slots_.push_back(std::move(sl));
    }
    tag(0).boundary = true;
    tag(E_ - 1).boundary = true;
    for (long e = 0; e < E_; ++e)
      if (tag_of_[std::size_t(e)] < 0) bulk_.push_back(std::uint32_t(e));
  }

  TrajectorySample run(std::uint64_t seed) {
    Xoshiro256 rng(seed);
    TrajectorySample out;
    out.n = cfg_.window.n;
    out.rng_seed = seed;
    for (std::size_t i = 0; i < obs_.size(); ++i) {
      ObservableSeries s;
      s.id = obs_[i].spec.id;
      s.kind = obs_[i].spec.kind;
      s.site = obs_[i].spec.site;
      out.series.push_back(std::move(s));
    }
    // merged checkpoint list: every distinct output time, then T
    std::vector<double> stops;
    for (const auto& o : obs_)
      for (double t : o.spec.output_times) {
        if (t > T_) throw Error(ErrorCode::invalid_time, "output time beyond horizon");
        stops.push_back(t);
      }
    stops.push_back(T_);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    double n2 = double(cfg_.window.n) * double(cfg_.window.n);
    double lam_tag = n2 * double(tagged_.size());
    double lam_bulk = n2 * double(bulk_.size());
    const std::uint32_t B = std::uint32_t(bulk_.size());
    const std::uint32_t nt = std::uint32_t(tagged_.size());
    const std::uint32_t* bulk = bulk_.data();
    std::uint8_t* occ = occ_;

    double t = 0;
    double t_tag = rng.exponential(lam_tag);
    std::size_t k = 0;
    std::uint64_t events = 0;
    while (k < stops.size()) {
      double stop = std::min(t_tag, stops[k]);
      if (B > 0 && stop > t) {
        std::poisson_distribution<std::uint64_t> pois(lam_bulk * (stop - t));
        std::uint64_t N = pois(rng);
        events += N;
        for (std::uint64_t i = 0; i < N; ++i) {
          std::uint32_t e = bulk[draw(rng, B)];
          std::uint8_t a = occ[e];
          occ[e] = occ[e + 1];
          occ[e + 1] = a;
        }
      }
      t = stop;
      if (t_tag <= stops[k]) {
        fire(std::uint32_t(draw(rng, nt)), t, out);
        ++events;
        t_tag += rng.exponential(lam_tag);
      } else {
        record(t, out);
        ++k;
      }
    }
    out.event_count = events;
    out.boundary_touches = touches_;
    cfg_.time += T_;
    return out;
  }

 private:
  struct Slots {
    int cur = -1, t1 = -1, t2 = -1;
    std::vector<std::pair<long, double>> weights;
  };

  std::uint32_t draw(Xoshiro256& rng, std::uint32_t range) {
    // Lemire's nearly divisionless bounded draw from 32-bit halves
    std::uint64_t m = std::uint64_t(next32(rng)) * range;
    std::uint32_t l = std::uint32_t(m);
    if (l < range) {
      std::uint32_t th = std::uint32_t(-range) % range;
      while (l < th) {
        m = std::uint64_t(next32(rng)) * range;
        l = std::uint32_t(m);
      }
    }
    return std::uint32_t(m >> 32);
  }

  std::uint32_t next32(Xoshiro256& rng) {
    if (have_) {
      have_ = false;
      return buf_;
    }
    std::uint64_t r = rng();
    buf_ = std::uint32_t(r >> 32);
    have_ = true;
    return std::uint32_t(r);
  }

  void fire(std::uint32_t which, double t, TrajectorySample&) {
    long e = tagged_[which];
    const EdgeHooks& h = hooks_[which];
    std::uint8_t a = occ_[e], b = occ_[e + 1];
    for (int id : h.tracked) tracked_[std::size_t(id)].flush(t);
    if (a != b) {
      for (int c : h.currents) counts_[std::size_t(c)] += a ? 1 : -1;
      if (h.boundary) ++touches_;
    }
    occ_[e] = b;
    occ_[e + 1] = a;
    for (int id : h.tracked) tracked_[std::size_t(id)].cur = tracked_[std::size_t(id)].value(occ_);
  }

  void record(double t, TrajectorySample& out) {
    for (auto& q : tracked_) q.flush(t);
    for (std::size_t i = 0; i < obs_.size(); ++i) {
      const auto& o = obs_[i];
      const auto& sp = o.spec;
      auto it = std::find(sp.output_times.begin(), sp.output_times.end(), t);
      if (it == sp.output_times.end()) continue;
      const Slots& sl = slots_[i];
      auto& ser = out.series[i];
      // repeated output times are recorded once per listing
      for (; it != sp.output_times.end() && *it == t; ++it) {
        std::size_t j = std::size_t(it - sp.output_times.begin());
        double raw = 0;
        switch (sp.kind) {
          case ObservableSpec::Kind::current:
            raw = double(counts_[std::size_t(sl.cur)]);
            ser.qv.push_back(tracked_[std::size_t(sl.t1)].integral);
            break;
          case ObservableSpec::Kind::occupation: raw = tracked_[std::size_t(sl.t1)].integral; break;
          case ObservableSpec::Kind::kv_block:
            raw = tracked_[std::size_t(sl.t1)].integral -
                  tracked_[std::size_t(sl.t2)].integral / double(sp.block_length);
            if (sp.block_length == 1) raw = 0.0;
            break;
          case ObservableSpec::Kind::density_field:
            for (auto& [x, w] : sl.weights) raw += w * occ_[x];
            break;
        }
        ser.times.push_back(t);
        ser.raw.push_back(raw);
        ser.value.push_back(sp.centred ? raw - o.centring[j] : raw);
      }
    }
  }

  Configuration& cfg_;
  const std::vector<Observable>& obs_;
  double T_;
  long E_;
  std::uint8_t* occ_;
  std::vector<int> tag_of_;
  std::vector<long> tagged_;
  std::vector<EdgeHooks> hooks_;
  std::vector<std::uint32_t> bulk_;
  std::vector<Tracked> tracked_;
  std::vector<long> counts_;
  std::vector<long> cur_edge_;
  std::vector<Slots> slots_;
  std::uint64_t touches_ = 0;
  std::uint32_t buf_ = 0;
  bool have_ = false;
};

}  // namespace

TrajectorySample evolve(Configuration& config, double T, const std::vector<Observable>& observables,
                        std::uint64_t seed) {
  if (!(T > 0)) throw Error(ErrorCode::invalid_time, "horizon must be positive");
  config.window.validate();
  for (const auto& o : observables) {
    o.spec.validate();
    if (o.n != config.window.n) throw Error(ErrorCode::invalid_input, "observable n does not match window n");
    if (o.spec.kind == ObservableSpec::Kind::density_field && o.spec.H.empty()) continue;
    auto [lo, hi] = o.spec.site_range(o.n);
    config.window.check_margin(lo, T);
    config.window.check_margin(hi, T);
  }
  Engine eng(config, observables, T);
  return eng.run(seed);
}

MartingaleSeries martingale_decomposition(const TrajectorySample& traj, long bond) {
  const auto* J = traj.find(ObservableSpec::Kind::current, bond);
  const ObservableSeries* G0 = nullptr;
  const ObservableSeries* G1 = nullptr;
  for (const auto& s : traj.series) {
    if (s.kind != ObservableSpec::Kind::occupation) continue;
    if (s.site == bond && !G0) G0 = &s;
    if (s.site == bond + 1 && !G1) G1 = &s;
  }
  if (!J || !G0 || !G1)
    throw Error(ErrorCode::insufficient_observables,
                "martingale needs the current at bond " + std::to_string(bond) + " and occupations at both ends");
  if (J->times != G0->times || J->times != G1->times)
    throw Error(ErrorCode::insufficient_observables, "current and occupation output times differ");
  double n2 = double(traj.n) * double(traj.n);
  MartingaleSeries m;
  m.times = J->times;
  for (std::size_t k = 0; k < J->times.size(); ++k) {
    m.M.push_back(J->value[k] - n2 * (G0->value[k] - G1->value[k]));
    m.qv_bound.push_back(n2 * J->qv[k]);
  }
  return m;
}

}  // namespace ssep
