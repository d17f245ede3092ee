#include "ssep/mc_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "ssep/error.hpp"
#include "ssep/rng.hpp"

namespace ssep {

void MomentAccumulator::add(const std::vector<double>& x) {
  MomentAccumulator one(x.size());
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  if (o.dim() != dim()) throw Error(ErrorCode::invalid_input, "accumulator dimensions differ");
  const std::size_t d = dim();
  double n = n_ + o.n_;
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = o.mean_[i] - mean_[i];
  double f = n_ * o.n_ / n;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m2_[i * d + j] += o.m2_[i * d + j] + delta[i] * delta[j] * f;
  for (std::size_t i = 0; i < d; ++i) mean_[i] += delta[i] * (o.n_ / n);
  n_ = n;
}

double MomentAccumulator::covariance(std::size_t i, std::size_t j) const {
  if (n_ < 2) return 0.0;
  return m2_[i * dim() + j] / (n_ - 1.0);
}

void ExperimentConfig::validate() const {
  if (replicas < 2) throw Error(ErrorCode::invalid_input, "replica count must be >= 2");
  if (!(T > 0)) throw Error(ErrorCode::invalid_time, "horizon T must be positive");
  if (margin_factor < 1.0) throw Error(ErrorCode::invalid_input, "margin_factor must be >= 1");
  if (observables.empty()) throw Error(ErrorCode::insufficient_observables, "experiment has no observables");
  std::set<std::string> ids;
  for (const auto& o : observables) {
    o.validate();
    if (!ids.insert(o.id).second) throw Error(ErrorCode::invalid_input, "duplicate observable id '" + o.id + "'");
    for (double t : o.output_times)
      if (t > T) throw Error(ErrorCode::invalid_time, "output time " + std::to_string(t) + " beyond horizon");
  }
  quad.validate();
}

const CovarianceEntry* CovarianceReport::find(const std::string& a, double s, const std::string& b, double t) const {
  for (const auto& e : entries) {
    if (e.obs_i == a && e.obs_j == b && e.s == s && e.t == t) return &e;
    if (e.obs_i == b && e.obs_j == a && e.s == t && e.t == s) return &e;
  }
  return nullptr;
}

long EnsembleResult::column(const std::string& obs, double t) const {
  for (std::size_t c = 0; c < columns(); ++c)
    if (column_obs[c] == obs && column_time[c] == t) return long(c);
  return -1;
}

double normalisation(ObservableSpec::Kind kind, long n) {
  switch (kind) {
    case ObservableSpec::Kind::current: return 1.0 / std::sqrt(double(n));
    case ObservableSpec::Kind::occupation: return std::sqrt(double(n));
    default: return 1.0;
  }
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      (void)w;
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

CovarianceEntry column_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  CovarianceEntry e;
  const std::size_t R = x.size();
  e.R = R;
  if (R < 2) return e;
  double mx = 0, my = 0;
  for (std::size_t r = 0; r < R; ++r) {
    mx += x[r];
    my += y[r];
  }
  mx /= double(R);
  my /= double(R);
  double c = 0;
  for (std::size_t r = 0; r < R; ++r) c += (x[r] - mx) * (y[r] - my);
  c /= double(R);
  double v = 0;
  for (std::size_t r = 0; r < R; ++r) {
    double d = (x[r] - mx) * (y[r] - my) - c;
    v += d * d;
  }
  v /= double(R - 1);
  e.cov = c * double(R) / double(R - 1);
  e.se = std::sqrt(v / double(R));
  return e;
}

CovarianceReport covariance_report(const EnsembleResult& e) {
  CovarianceReport rep;
  const std::size_t C = e.columns(), R = e.replicas;
  std::vector<std::vector<double>> cols(C, std::vector<double>(R));
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) cols[c][r] = e.at(r, c);
  for (std::size_t i = 0; i < C; ++i)
    for (std::size_t j = i; j < C; ++j) {
      auto ent = column_covariance(cols[i], cols[j]);
      ent.obs_i = e.column_obs[i];
      ent.obs_j = e.column_obs[j];
      ent.s = e.column_time[i];
      ent.t = e.column_time[j];
      rep.entries.push_back(ent);
    }
  return rep;
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg) { return run_ensemble(cfg, cfg.n); }

EnsembleResult run_ensemble(const ExperimentConfig& cfg, long n) {
  cfg.validate();
  if (n < 1) throw Error(ErrorCode::invalid_input, "n must be positive");
  std::vector<ObservableSpec> specs;
  long lo = 0, hi = 0;
  bool first = true;
  for (const auto& o : cfg.observables) {
    specs.push_back(o.resolve(n));
    if (specs.back().kind == ObservableSpec::Kind::density_field && specs.back().H.empty()) continue;
    auto [a, b] = specs.back().site_range(n);
    lo = first ? a : std::min(lo, a);
    hi = first ? b : std::max(hi, b);
    first = false;
  }
  auto window = LatticeWindow::around(n, lo, hi, cfg.T, cfg.margin_factor);
  double cost = double(cfg.replicas) * double(window.edges()) * double(n) * double(n) * cfg.T;
  if (cost > cfg.max_events)
    throw Error(ErrorCode::resource_cap, "ensemble needs ~" + std::to_string(cost) + " events, cap is " +
                                             std::to_string(cfg.max_events));
  HeatField field(cfg.profile, n, cfg.quad);
  std::vector<Observable> obs;
  EnsembleResult res;
  res.n = n;
  res.window = window;
  res.replicas = std::size_t(cfg.replicas);
  for (const auto& s : specs) {
    obs.push_back(make_observable(s, &field, n));
    res.centring_error = std::max(res.centring_error, obs.back().centring_error);
    for (double t : s.output_times) {
      res.column_obs.push_back(s.id);
      res.column_time.push_back(t);
    }
  }
  const std::size_t C = res.columns(), R = res.replicas;
  res.data.assign(R * C, 0.0);
  res.qv.assign(C, 0.0);
  std::vector<std::uint64_t> events(R), touches(R);
  std::vector<std::vector<double>> qv(R);
  parallel_for(R, cfg.threads, [&](std::size_t r) {
    std::uint64_t sd = replica_seed(cfg.seed, r);
    auto config = sample_initial_configuration(cfg.profile, window, stream_seed(sd, 0));
    auto traj = evolve(config, cfg.T, obs, stream_seed(sd, 1));
    std::size_t c = 0;
    qv[r].assign(C, 0.0);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      double norm = normalisation(obs[i].spec.kind, n);
      const auto& ser = traj.series[i];
      for (std::size_t k = 0; k < ser.value.size(); ++k, ++c) {
        res.data[r * C + c] = norm * ser.value[k];
        if (!ser.qv.empty()) qv[r][c] = double(n) * double(n) * ser.qv[k];
      }
    }
    events[r] = traj.event_count;
    touches[r] = traj.boundary_touches;
  });
  for (std::size_t r = 0; r < R; ++r) {
    res.events += events[r];
    res.boundary_touches += touches[r];
    for (std::size_t c = 0; c < C; ++c) res.qv[c] = std::max(res.qv[c], qv[r][c]);
  }
  // streaming means, merged chunk by chunk in index order
  const std::size_t chunk = 256;
  MomentAccumulator acc(C);
  for (std::size_t b = 0; b < R; b += chunk) {
    MomentAccumulator part(C);
    std::vector<double> row(C);
    for (std::size_t r = b; r < std::min(R, b + chunk); ++r) {
      std::copy(res.data.begin() + long(r * C), res.data.begin() + long((r + 1) * C), row.begin());
      part.add(row);
    }
    acc.merge(part);
  }
  for (std::size_t c = 0; c < C; ++c) res.means.push_back(acc.mean(c));
  res.report = covariance_report(res);
  return res;
}

MarginCheck margin_doubling_check(const ExperimentConfig& cfg, long n) {
  auto a = run_ensemble(cfg, n);
  ExperimentConfig c2 = cfg;
  c2.margin_factor = 2.0 * cfg.margin_factor;
  auto b = run_ensemble(c2, n);
  MarginCheck mc;
  for (std::size_t i = 0; i < a.report.entries.size(); ++i) {
    const auto& x = a.report.entries[i];
    const auto& y = b.report.entries[i];
    double d = std::abs(x.cov - y.cov);
    double se = std::sqrt(x.se * x.se + y.se * y.se);
    mc.max_abs_diff = std::max(mc.max_abs_diff, d);
    if (se > 0) mc.max_z = std::max(mc.max_z, d / se);
    ++mc.entries;
  }
  return mc;
}

HurstFit hurst_fit(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw Error(ErrorCode::invalid_input, "time and variance tables differ in length");
  if (t.size() < 4) throw Error(ErrorCode::invalid_input, "hurst fit needs >= 4 times");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(v[i] > 0)) throw Error(ErrorCode::invalid_input, "variances must be positive");
    if (!(t[i] > 0)) throw Error(ErrorCode::invalid_input, "times must be positive");
    x.push_back(std::log(t[i]));
    y.push_back(std::log(v[i]));
  }
  const double m = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  HurstFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.slope_se = std::sqrt(rss / (m - 2.0) / sxx);
  return f;
}

BoundCheck bound_check(const std::vector<BoundPoint>& pts, const std::function<double(const std::vector<double>&)>& bound,
                       const std::vector<int>& dir, FitMode mode, double C_claim) {
  if (pts.empty()) throw Error(ErrorCode::invalid_input, "bound check needs a nonempty grid");
  BoundCheck bc;
  const std::size_t A = pts[0].coords.size();
  if (dir.size() != A) throw Error(ErrorCode::invalid_input, "one asymptotic direction per axis");
  for (const auto& p : pts) {
    if (p.coords.size() != A) throw Error(ErrorCode::invalid_input, "grid points differ in dimension");
    double b = bound(p.coords);
    if (!(b > 0)) throw Error(ErrorCode::invalid_input, "bound must be strictly positive on the grid");
    bc.bounds.push_back(b);
    bc.ratios.push_back(p.estimate / b);
  }
  bc.C_fit = *std::max_element(bc.ratios.begin(), bc.ratios.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool v = false;
    if (C_claim > 0) v = bc.ratios[i] - 3.0 * pts[i].se / bc.bounds[i] > C_claim;
    bc.violation.push_back(v);
  }
  for (std::size_t a = 0; a < A; ++a) {
    std::map<std::vector<double>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<double> key;
      for (std::size_t b = 0; b < A; ++b)
        if (b != a) key.push_back(pts[i].coords[b]);
      groups[key].push_back(i);
    }
    for (auto& [key, idx] : groups) {
      if (idx.size() < 3) continue;
      std::vector<double> x, y, w;
      for (std::size_t i : idx) {
        double c = pts[i].coords[a];
        x.push_back(double(dir[a]) * (c > 0 ? std::log(c) : c));
        y.push_back(bc.ratios[i]);
        double sr = pts[i].se / bc.bounds[i];
        w.push_back(sr > 0 ? 1.0 / (sr * sr) : 1.0);
      }
      TrendFlag tf;
      tf.axis = a;
      tf.fixed = key;
      if (mode == FitMode::noisy) {
        double sw = 0, mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          sw += w[i];
          mx += w[i] * x[i];
          my += w[i] * y[i];
        }
        mx /= sw;
        my /= sw;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          sxx += w[i] * (x[i] - mx) * (x[i] - mx);
          sxy += w[i] * (x[i] - mx) * (y[i] - my);
        }
        tf.slope = sxy / sxx;
        double se = std::sqrt(1.0 / sxx);
        boost::math::normal nd;
        tf.p_value = boost::math::cdf(boost::math::complement(nd, tf.slope / se));
        tf.growth = tf.p_value < 0.01;
      } else {
        // exact values: log-log slope over the three most asymptotic points
        std::vector<std::size_t> ord(x.size());
        for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t p, std::size_t q) { return x[p] < x[q]; });
        std::vector<double> xs, ys;
        for (std::size_t i = ord.size() - 3; i < ord.size(); ++i) {
          if (y[ord[i]] <= 0) continue;
          xs.push_back(x[ord[i]]);
          ys.push_back(std::log(y[ord[i]]));
        }
        if (xs.size() >= 2) {
          double mx = 0, my = 0;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
          }
          mx /= double(xs.size());
          my /= double(xs.size());
          double sxx = 0, sxy = 0;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
          }
          tf.slope = sxx > 0 ? sxy / sxx : 0.0;
        }
        tf.p_value = tf.slope > 0.1 ? 0.0 : 1.0;
        tf.growth = tf.slope > 0.1;
      }
      bc.any_trend = bc.any_trend || tf.growth;
      bc.trends.push_back(tf);
    }
  }
  return bc;
}

double kv_bound(double s, double t, double eps, long n) {
  double d = t - s;
  return d * std::pow(eps, 0.75) / double(n) * (1.0 + std::pow(d, 0.25) + d);
}

std::vector<KvRow> kv_experiment(const Profile& profile, const std::vector<long>& ns, const std::vector<double>& eps,
                                 const std::vector<std::pair<double, double>>& st, long replicas, std::uint64_t seed,
                                 unsigned threads, double margin_factor) {
  if (ns.empty() || eps.empty() || st.empty()) throw Error(ErrorCode::invalid_input, "kv grids must be nonempty");
  std::vector<double> times;
  for (auto [s, t] : st) {
    if (!(s >= 0) || !(t >= s)) throw Error(ErrorCode::invalid_time, "kv needs 0 <= s <= t");
    if (s > 0) times.push_back(s);
    if (t > 0) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<KvRow> rows;
  for (long n : ns) {
    ExperimentConfig cfg;
    cfg.profile = profile;
    cfg.n = n;
    cfg.replicas = replicas;
    cfg.seed = stream_seed(seed, std::uint64_t(n));
    cfg.threads = threads;
    cfg.margin_factor = margin_factor;
    cfg.T = times.empty() ? 1.0 : times.back();
    std::vector<long> ells;
    for (double e : eps) {
      if (!(e > 0) || e > 1) throw Error(ErrorCode::invalid_input, "eps must lie in (0, 1]");
      ells.push_back(std::max(1L, std::lround(e * double(n))));
    }
    std::vector<long> uniq = ells;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    EnsembleResult res;
    if (!times.empty()) {
      for (long l : uniq) cfg.observables.push_back(ObservableSpec::kv_block(l, times));
      res = run_ensemble(cfg, n);
    }
    for (std::size_t k = 0; k < eps.size(); ++k)
      for (auto [s, t] : st) {
        KvRow row;
        row.n = n;
        row.eps = eps[k];
        row.ell = ells[k];
        row.eps_eff = double(ells[k]) / double(n);
        row.s = s;
        row.t = t;
        if (t > s && row.ell > 1) {
          std::string id = "KV" + std::to_string(row.ell);
          long ct = res.column(id, t);
          long cs = s > 0 ? res.column(id, s) : -1;
          double m = 0, m2 = 0;
          const std::size_t R = res.replicas;
          std::vector<double> sq(R);
          for (std::size_t r = 0; r < R; ++r) {
            double x = res.at(r, std::size_t(ct)) - (cs >= 0 ? res.at(r, std::size_t(cs)) : 0.0);
            sq[r] = x * x;
            m += sq[r];
          }
          m /= double(R);
          for (double v : sq) m2 += (v - m) * (v - m);
          row.estimate = m;
          row.se = std::sqrt(m2 / double(R - 1) / double(R));
        }
        row.bound = t > s ? kv_bound(s, t, row.eps_eff, n) : 0.0;
        row.ratio = row.bound > 0 ? row.estimate / row.bound : 0.0;
        rows.push_back(row);
      }
  }
  return rows;
}

Verdict compare_mc_limit(double mc, double se, const LimitValue& target, double rel_slack, double abs_slack) {
  Verdict v;
  v.mc = mc;
  v.se = se;
  v.limit = target.value;
  v.limit_error = target.error_estimate;
  v.z = se > 0 ? (mc - target.value) / se : 0.0;
  v.tolerance = std::max(3.0 * se + target.error_estimate, rel_slack * std::abs(target.value) + abs_slack);
  v.pass = std::abs(mc - target.value) <= v.tolerance;
  return v;
}

PairAverage pair_correlation_average(const Profile& profile, long n, double t, double u_lo, double u_hi,
                                     double max_gap_macro, long replicas, std::uint64_t seed, unsigned threads,
                                     double margin_factor) {
  if (replicas < 2) throw Error(ErrorCode::invalid_input, "replica count must be >= 2");
  if (!(t > 0)) throw Error(ErrorCode::invalid_time, "t must be positive");
  long lo = long(std::ceil(u_lo * double(n))), hi = long(std::floor(u_hi * double(n)));
  long D = std::max(1L, std::lround(max_gap_macro * double(n)));
  if (hi <= lo) throw Error(ErrorCode::invalid_input, "pair block is empty");
  auto window = LatticeWindow::around(n, lo, hi, t, margin_factor);
  HeatField field(profile, n);
  std::vector<double> rho;
  for (long x = lo; x <= hi; ++x) rho.push_back(field.discrete_density(x, t));
  std::size_t pairs = 0;
  for (long x = lo; x <= hi; ++x) pairs += std::size_t(std::min(x + D, hi) - x);
  std::vector<double> val(static_cast<std::size_t>(replicas));
  parallel_for(std::size_t(replicas), threads, [&](std::size_t r) {
    std::uint64_t sd = replica_seed(seed, r);
    auto config = sample_initial_configuration(profile, window, stream_seed(sd, 0));
    evolve(config, t, {}, stream_seed(sd, 1));
    const std::size_t B = std::size_t(hi - lo + 1);
    std::vector<double> pre(B + 1, 0.0), eb(B);
    for (std::size_t i = 0; i < B; ++i) {
      eb[i] = double(config.at(lo + long(i))) - rho[i];
      pre[i + 1] = pre[i] + eb[i];
    }
    double s = 0;
    for (std::size_t i = 0; i < B; ++i) {
      std::size_t j = std::min(B - 1, i + std::size_t(D));
      s += eb[i] * (pre[j + 1] - pre[i + 1]);
    }
    val[r] = s / double(pairs);
  });
  PairAverage out;
  out.n = n;
  out.t = t;
  out.pairs = pairs;
  out.replicas = std::size_t(replicas);
  double m = 0;
  for (double v : val) m += v;
  m /= double(replicas);
  double v2 = 0;
  for (double v : val) v2 += (v - m) * (v - m);
  out.estimate = m;
  out.se = std::sqrt(v2 / double(replicas - 1) / double(replicas));
  return out;
}

}  // namespace ssep
