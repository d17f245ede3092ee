#include "ssep/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssep/error.hpp"
#include "ssep/mean_field.hpp"
#include "ssep/rng.hpp"

namespace ssep {

UniformisationResult uniformise(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                                const std::vector<double>& v0, double lambda, const std::vector<double>& times,
                                double tail_tol) {
  UniformisationResult res;
  const std::size_t m = times.size();
  res.values.assign(m, std::vector<double>(v0.size(), 0.0));
  res.truncated_mass.assign(m, 0.0);
  std::vector<double> mean(m);
  std::vector<bool> done(m, false);
  double max_mean = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (!(times[j] >= 0)) throw Error(ErrorCode::invalid_time, "uniformisation needs t >= 0");
    mean[j] = lambda * times[j];
    max_mean = std::max(max_mean, mean[j]);
    if (times[j] == 0) {
      res.values[j] = v0;
      done[j] = true;
    }
  }
  double est = (max_mean + 10.0 * std::sqrt(max_mean) + 40.0) * double(v0.size());
  if (est > 2e11) throw Error(ErrorCode::resource_cap, "uniformisation would need ~" + std::to_string(est) + " operations");
  std::vector<double> v = v0, nx(v0.size());
  for (std::size_t k = 0;; ++k) {
    bool all = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (done[j]) continue;
      all = false;
      double lw = -mean[j] + double(k) * std::log(mean[j]) - std::lgamma(double(k) + 1.0);
      double w = std::exp(lw);
      if (w > 0)
        for (std::size_t i = 0; i < v.size(); ++i) res.values[j][i] += w * v[i];
      // geometric bound on the remaining Poisson tail once past the mode
      double kk = double(k) + 1.0;
      if (kk > mean[j]) {
        double r = mean[j] / kk;
        double tail = w * r / (1.0 - r);
        if (tail < tail_tol) {
          res.truncated_mass[j] = tail;
          done[j] = true;
        }
      }
    }
    if (all) break;
    apply(v, nx);
    v.swap(nx);
  }
  return res;
}

void SmallSystem::validate() const {
  if (sites < 2) throw Error(ErrorCode::invalid_input, "small system needs >= 2 sites");
  if (sites > kMaxSites)
    throw Error(ErrorCode::system_too_large, "full state space capped at " + std::to_string(kMaxSites) + " sites");
  if (n < 1) throw Error(ErrorCode::invalid_input, "n must be positive");
}

namespace {

void apply_full(int L, const std::vector<double>& v, std::vector<double>& out) {
  const std::size_t N = v.size();
  const double inv = 1.0 / double(L - 1);
  for (std::size_t eta = 0; eta < N; ++eta) {
    double acc = 0;
    for (int e = 0; e + 1 < L; ++e) {
      std::size_t diff = ((eta >> e) ^ (eta >> (e + 1))) & 1u;
      acc += v[diff ? eta ^ (std::size_t(3) << e) : eta];
    }
    out[eta] = acc * inv;
  }
}

double full_rate(const SmallSystem& s) { return double(s.sites - 1) * double(s.n) * double(s.n); }

std::vector<double> evolve_signed(const SmallSystem& sys, const std::vector<double>& v, double t, double* tail) {
  auto r = uniformise([&](const std::vector<double>& a, std::vector<double>& b) { apply_full(sys.sites, a, b); }, v,
                      full_rate(sys), {t}, sys.tail_tol);
  if (tail) *tail = r.truncated_mass[0];
  return std::move(r.values[0]);
}

}  // namespace

EvolveReport evolve_distribution(const SmallSystem& sys, const std::vector<double>& dist, double t) {
  sys.validate();
  if (dist.size() != sys.states()) throw Error(ErrorCode::invalid_input, "distribution size does not match system");
  double s0 = std::accumulate(dist.begin(), dist.end(), 0.0);
  if (std::abs(s0 - 1.0) > 1e-12) throw Error(ErrorCode::invalid_input, "distribution must sum to 1");
  EvolveReport rep;
  rep.dist = evolve_signed(sys, dist, t, nullptr);
  double s = std::accumulate(rep.dist.begin(), rep.dist.end(), 0.0);
  rep.renormalisation_delta = 1.0 - s;
  for (auto& p : rep.dist) p /= s;
  return rep;
}

std::vector<double> product_measure(const SmallSystem& sys, const Profile& profile) {
  sys.validate();
  std::vector<double> rho(std::size_t(sys.sites));
  for (int i = 0; i < sys.sites; ++i) rho[std::size_t(i)] = profile(double(sys.x0 + i) / double(sys.n));
  std::vector<double> d(sys.states());
  for (std::size_t eta = 0; eta < d.size(); ++eta) {
    double p = 1;
    for (int i = 0; i < sys.sites; ++i) p *= ((eta >> i) & 1u) ? rho[std::size_t(i)] : 1.0 - rho[std::size_t(i)];
    d[eta] = p;
  }
  return d;
}

std::vector<double> finite_density(const SmallSystem& sys, const Profile& profile, double t) {
  sys.validate();
  const int L = sys.sites;
  std::vector<double> rho(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) rho[std::size_t(i)] = profile(double(sys.x0 + i) / double(sys.n));
  if (t == 0) return rho;
  // one walker, rate n^2 per edge, reflecting ends; uniformised at 2n^2
  auto apply = [L](const std::vector<double>& a, std::vector<double>& b) {
    for (int i = 0; i < L; ++i) {
      double acc = a[std::size_t(i)];
      if (i > 0) acc += 0.5 * (a[std::size_t(i - 1)] - a[std::size_t(i)]);
      if (i + 1 < L) acc += 0.5 * (a[std::size_t(i + 1)] - a[std::size_t(i)]);
      b[std::size_t(i)] = acc;
    }
  };
  auto r = uniformise(apply, rho, 2.0 * double(sys.n) * double(sys.n), {t}, sys.tail_tol);
  return r.values[0];
}

double exact_correlation(const SmallSystem& sys, const Profile& profile, const std::vector<double>& times,
                         const std::vector<std::vector<int>>& site_lists) {
  sys.validate();
  if (times.size() != site_lists.size()) throw Error(ErrorCode::invalid_input, "one site list per time");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0) || (j > 0 && times[j] < times[j - 1]))
      throw Error(ErrorCode::invalid_time, "correlation times must be nondecreasing and >= 0");
    for (int i : site_lists[j])
      if (i < 0 || i >= sys.sites) throw Error(ErrorCode::invalid_input, "correlation site outside system");
  }
  std::vector<double> mu = product_measure(sys, profile);
  double prev = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] > prev) mu = evolve_signed(sys, mu, times[j] - prev, nullptr);
    prev = times[j];
    auto rho = finite_density(sys, profile, times[j]);
    for (std::size_t eta = 0; eta < mu.size(); ++eta) {
      double f = 1;
      for (int i : site_lists[j]) f *= double((eta >> i) & 1u) - rho[std::size_t(i)];
      mu[eta] *= f;
    }
  }
  double s = 0;
  for (double v : mu) s += v;
  return s;
}

double increment_correlation(const SmallSystem& sys, const Profile& profile, double s, double t,
                             const std::vector<int>& sites) {
  if (!(s >= 0) || !(t >= s)) throw Error(ErrorCode::invalid_time, "increment needs 0 <= s <= t");
  if (sites.empty() || sites.size() > 20) throw Error(ErrorCode::invalid_input, "increment needs 1..20 points");
  const std::size_t k = sites.size();
  double total = 0;
  for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
    std::vector<int> at_s, at_t;
    for (std::size_t i = 0; i < k; ++i) ((mask >> i) & 1u ? at_t : at_s).push_back(sites[i]);
    double sign = (k - at_t.size()) % 2 == 0 ? 1.0 : -1.0;
    total += sign * exact_correlation(sys, profile, {s, t}, {at_s, at_t});
  }
  return total;
}

LabelledSystem::LabelledSystem(int k, int sites, long n, std::size_t max_states) : k_(k), sites_(sites), n_(n) {
  if (k < 1 || k > 3) throw Error(ErrorCode::invalid_input, "labelled systems support 1 <= k <= 3");
  if (sites < k + 1) throw Error(ErrorCode::invalid_input, "labelled system needs more sites than particles");
  if (n < 1) throw Error(ErrorCode::invalid_input, "n must be positive");
  if (sites > kMaxSites) throw Error(ErrorCode::system_too_large, "labelled systems are capped at 24 sites");
  double radix = std::pow(double(sites), double(k));
  if (radix > double(max_states) * 4.0)
    throw Error(ErrorCode::system_too_large, "labelled state space exceeds the configured cap");
  std::size_t R = std::size_t(radix);
  index_.assign(R, -1);
  std::vector<int> pos(std::size_t(k), 0);
  for (std::size_t code = 0; code < R; ++code) {
    std::size_t c = code;
    for (int j = 0; j < k; ++j) {
      pos[std::size_t(j)] = int(c % std::size_t(sites));
      c /= std::size_t(sites);
    }
    bool ok = true;
    for (int a = 0; a < k && ok; ++a)
      for (int b = a + 1; b < k; ++b)
        if (pos[std::size_t(a)] == pos[std::size_t(b)]) ok = false;
    if (!ok) continue;
    index_[code] = long(states_.size() / std::size_t(k));
    states_.insert(states_.end(), pos.begin(), pos.end());
  }
  if (size() > max_states) throw Error(ErrorCode::system_too_large, "labelled state space exceeds the configured cap");
  // slot (j, dir): particle j across its left (dir 0) or right (dir 1) edge.
  // An edge between two particles is owned by the left particle's right slot.
  nb_.resize(size() * std::size_t(2 * k));
  for (std::size_t s = 0; s < size(); ++s) {
    std::vector<int> p(states_.begin() + long(s) * k, states_.begin() + long(s + 1) * k);
    for (int j = 0; j < k; ++j)
      for (int dir = 0; dir < 2; ++dir) {
        std::size_t slot = s * std::size_t(2 * k) + std::size_t(2 * j + dir);
        int to = p[std::size_t(j)] + (dir ? 1 : -1);
        nb_[slot] = std::int32_t(s);
        if (to < 0 || to >= sites) continue;
        int other = -1;
        for (int q = 0; q < k; ++q)
          if (p[std::size_t(q)] == to) other = q;
        std::vector<int> np = p;
        if (other >= 0) {
          if (dir == 0) continue;  // owned by the other particle's right slot
          std::swap(np[std::size_t(j)], np[std::size_t(other)]);
        } else {
          np[std::size_t(j)] = to;
        }
        nb_[slot] = std::int32_t(index(np));
      }
  }
}

long LabelledSystem::index(const std::vector<int>& pos) const {
  if (int(pos.size()) != k_) return -1;
  std::size_t code = 0, mul = 1;
  for (int j = 0; j < k_; ++j) {
    int p = pos[std::size_t(j)];
    if (p < 0 || p >= sites_) return -1;
    code += std::size_t(p) * mul;
    mul *= std::size_t(sites_);
  }
  return index_[code];
}

std::vector<int> LabelledSystem::state(std::size_t idx) const {
  return std::vector<int>(states_.begin() + long(idx) * k_, states_.begin() + long(idx + 1) * k_);
}

void LabelledSystem::apply(const std::vector<double>& v, std::vector<double>& out) const {
  const std::size_t S = size();
  const int w = 2 * k_;
  const double inv = 1.0 / double(w);
  for (std::size_t s = 0; s < S; ++s) {
    const std::int32_t* nb = &nb_[s * std::size_t(w)];
    double acc = 0;
    for (int q = 0; q < w; ++q) acc += v[std::size_t(nb[q])];
    out[s] = acc * inv;
  }
}

std::vector<std::vector<double>> LabelledSystem::lex_row(const std::vector<int>& x,
                                                         const std::vector<double>& times) const {
  long ix = index(x);
  if (ix < 0) throw Error(ErrorCode::invalid_input, "labelled state must be non-repetitive and inside the window");
  std::vector<double> v(size(), 0.0);
  v[std::size_t(ix)] = 1.0;
  // the chain is symmetric, so the forward row equals P^k applied to the indicator
  auto r = uniformise([this](const std::vector<double>& a, std::vector<double>& b) { apply(a, b); }, v,
                      uniform_rate(), times);
  return std::move(r.values);
}

double LabelledSystem::lex_transition(const std::vector<int>& x, const std::vector<int>& y, double t) const {
  long iy = index(y);
  if (iy < 0) throw Error(ErrorCode::invalid_input, "labelled state must be non-repetitive and inside the window");
  return lex_row(x, {t})[0][std::size_t(iy)];
}

GradientScan gradient_scan(const LabelledSystem& sys, const std::vector<double>& times, int coordinate) {
  if (coordinate < 0 || coordinate >= sys.k()) throw Error(ErrorCode::invalid_input, "coordinate out of range");
  GradientScan scan;
  scan.k = sys.k();
  scan.n = sys.n();
  scan.coordinate = coordinate;
  const double n2 = double(sys.n()) * double(sys.n());
  // pairs (x, x + e_i) inside Lambda^k
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t s = 0; s < sys.size(); ++s) {
    auto p = sys.state(s);
    p[std::size_t(coordinate)] += 1;
    long j = sys.index(p);
    if (j >= 0) pairs.push_back({s, std::size_t(j)});
  }
  std::vector<double> sup(times.size(), 0.0);
  // p is symmetric: the row from y gives p_t(., y)
  for (std::size_t y = 0; y < sys.size(); ++y) {
    auto rows = sys.lex_row(sys.state(y), times);
    for (std::size_t m = 0; m < times.size(); ++m)
      for (auto [a, b] : pairs) sup[m] = std::max(sup[m], std::abs(rows[m][a] - rows[m][b]));
  }
  scan.min_scaled = INFINITY;
  for (std::size_t m = 0; m < times.size(); ++m) {
    GradientPoint g;
    g.t = times[m];
    g.n2t = n2 * times[m];
    g.sup = sup[m];
    g.scaled = sup[m] * std::pow(g.n2t + 1.0, 0.5 * double(sys.k() + 1));
    scan.fitted_constant = std::max(scan.fitted_constant, g.scaled);
    scan.min_scaled = std::min(scan.min_scaled, g.scaled);
    scan.points.push_back(g);
  }
  return scan;
}

namespace {

// (k+1) labelled particles on Z; first/second are the indices of the coupled pair.
struct CoupledZ {
  std::vector<long> pos;
  std::size_t first, second;

  CoupledZ(int k, const std::vector<long>& start, int coordinate) {
    if (int(start.size()) != k) throw Error(ErrorCode::invalid_input, "start must have k coordinates");
    if (coordinate < 0 || coordinate >= k) throw Error(ErrorCode::invalid_input, "coordinate out of range");
    for (int j = 0; j < k; ++j) {
      pos.push_back(start[std::size_t(j)]);
      if (j == coordinate) pos.push_back(start[std::size_t(j)] + 1);
    }
    first = std::size_t(coordinate);
    second = first + 1;
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b)
        if (pos[a] == pos[b]) throw Error(ErrorCode::invalid_input, "start and start + e_i must be non-repetitive");
  }

  // advance until `until` or until tau when stop_at_tau; returns tau or +inf
  double run(Xoshiro256& rng, double n2, double until, bool stop_at_tau) {
    double t = 0, tau = INFINITY;
    std::vector<long> edges;
    edges.reserve(2 * pos.size());
    for (;;) {
      edges.clear();
      for (long p : pos) {
        edges.push_back(p - 1);
        edges.push_back(p);
      }
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      t += rng.exponential(2.0 * n2 * double(edges.size()));
      if (t > until) return tau;
      long a = edges[bounded32(std::uint32_t(rng() >> 32), std::uint32_t(edges.size()))];
      bool link = (pos[first] == a && pos[second] == a + 1) || (pos[second] == a && pos[first] == a + 1);
      if (link && tau == INFINITY) {
        tau = t;
        if (stop_at_tau) return tau;
      }
      if (rng() & 1u) {
        for (auto& p : pos) {
          if (p == a)
            p = a + 1;
          else if (p == a + 1)
            p = a;
        }
      }
    }
  }
};

}  // namespace

std::vector<TailEstimate> coupling_tau_tail(int k, const std::vector<long>& start, int coordinate,
                                            const std::vector<double>& times, long n, std::size_t replicas,
                                            std::uint64_t seed) {
  if (replicas < 1) throw Error(ErrorCode::invalid_input, "replicas must be >= 1");
  CoupledZ proto(k, start, coordinate);
  double tmax = 0;
  for (double t : times) {
    if (!(t >= 0)) throw Error(ErrorCode::invalid_time, "times must be >= 0");
    tmax = std::max(tmax, t);
  }
  std::vector<std::size_t> alive(times.size(), 0);
  const double n2 = double(n) * double(n);
  for (std::size_t r = 0; r < replicas; ++r) {
    Xoshiro256 rng(replica_seed(seed, r));
    CoupledZ z = proto;
    double tau = z.run(rng, n2, tmax, true);
    for (std::size_t m = 0; m < times.size(); ++m)
      if (tau > times[m]) ++alive[m];
  }
  std::vector<TailEstimate> out;
  for (std::size_t m = 0; m < times.size(); ++m) {
    TailEstimate e;
    e.t = times[m];
    e.replicas = replicas;
    e.tail = double(alive[m]) / double(replicas);
    e.se = std::sqrt(e.tail * (1.0 - e.tail) / double(replicas));
    out.push_back(e);
  }
  return out;
}

CouplingMarginals coupling_marginals(int k, const std::vector<long>& start, int coordinate, double t, long n,
                                     std::size_t replicas, std::uint64_t seed) {
  CoupledZ proto(k, start, coordinate);
  CouplingMarginals out;
  const double n2 = double(n) * double(n);
  for (std::size_t r = 0; r < replicas; ++r) {
    Xoshiro256 rng(replica_seed(seed, r));
    CoupledZ z = proto;
    z.run(rng, n2, t, false);
    std::vector<long> X, Y;
    for (std::size_t j = 0; j < z.pos.size(); ++j) {
      if (j != z.second) X.push_back(z.pos[j]);
      if (j != z.first) Y.push_back(z.pos[j]);
    }
    out.X.push_back(std::move(X));
    out.Y.push_back(std::move(Y));
  }
  return out;
}

MeetingTail meeting_time_oracle(double t, long n, long max_distance) {
  if (!(t >= 0)) throw Error(ErrorCode::invalid_time, "t must be >= 0");
  MeetingTail out;
  const double lam = 4.0 * double(n) * double(n);
  long M = max_distance > 0 ? max_distance : long(std::ceil(8.0 * std::sqrt(lam * t) + 30.0));
  out.max_distance = M;
  if (t == 0) {
    out.tail = 1.0;
    return out;
  }
  std::vector<double> v(std::size_t(M + 1), 0.0);
  v[1] = 1.0;
  // forward law: 0 and M absorb, interior moves +-1 with probability 1/2
  auto apply = [M](const std::vector<double>& a, std::vector<double>& b) {
    std::fill(b.begin(), b.end(), 0.0);
    b[0] += a[0];
    b[std::size_t(M)] += a[std::size_t(M)];
    for (long j = 1; j < M; ++j) {
      b[std::size_t(j - 1)] += 0.5 * a[std::size_t(j)];
      b[std::size_t(j + 1)] += 0.5 * a[std::size_t(j)];
    }
  };
  auto r = uniformise(apply, v, lam, {t});
  const auto& d = r.values[0];
  out.boundary_mass = d[std::size_t(M)];
  double s = 0;
  for (long j = 1; j <= M; ++j) s += d[std::size_t(j)];
  out.tail = s;
  if (out.boundary_mass > 1e-8)
    throw Error(ErrorCode::boundary_mass_too_large,
                "mass " + std::to_string(out.boundary_mass) + " reached distance " + std::to_string(M));
  return out;
}

double meeting_time_closed_form(double t, long n) {
  auto k = random_walk_kernel(4.0 * double(n) * double(n) * t);
  return k[0] + k[1];
}

}  // namespace ssep
