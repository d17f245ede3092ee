// Acceptance suite. `acceptance <criterion>` runs one criterion (1..11) or
// `all`; each prints one PASS/FAIL line plus INFO detail lines.
//
// SSEP_ACCEPT_SCALE multiplies every replica count (default 1). Scaled runs
// are for smoke testing only; the tolerances never change.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ssep/exact_oracle.hpp"
#include "ssep/limit_gaussian.hpp"
#include "ssep/mc_lab.hpp"
#include "ssep/rng.hpp"

using namespace ssep;
namespace fs = std::filesystem;

namespace {

double scale() {
  const char* s = std::getenv("SSEP_ACCEPT_SCALE");
  if (!s) return 1.0;
  double v = std::atof(s);
  return v > 0 ? v : 1.0;
}

long reps(double r) { return std::max(50L, std::lround(r * scale())); }

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
  std::printf("  INFO ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
  std::fflush(stdout);
}

bool verdict(int c, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", c, what.c_str());
  std::fflush(stdout);
  return ok;
}

std::vector<double> column(const EnsembleResult& e, const std::string& id, double t) {
  long c = e.column(id, t);
  std::vector<double> x(e.replicas);
  for (std::size_t r = 0; r < e.replicas; ++r) x[r] = e.at(r, std::size_t(c));
  return x;
}

// ---------------------------------------------------------------------------
// Equilibrium ensemble shared by criteria 1, 2 and 4, cached next to the binary.

const std::vector<double> kDyadic{0.125, 0.25, 0.5, 1.0, 2.0};

ExperimentConfig equilibrium_config() {
  ExperimentConfig c;
  c.profile = Profile::constant(0.5);
  c.n = 100;
  c.T = 2.0;
  c.replicas = reps(2e4);
  c.seed = 20240601;
  c.observables = {ObservableSpec::current(0, kDyadic, "J"), ObservableSpec::occupation(0, kDyadic, true, "G")};
  return c;
}

std::string cache_key(const ExperimentConfig& c) {
  std::ostringstream k;
  k << "eq-v1 n=" << c.n << " T=" << c.T << " R=" << c.replicas << " seed=" << c.seed;
  return k.str();
}

EnsembleResult equilibrium_ensemble() {
  auto cfg = equilibrium_config();
  const fs::path path = "acceptance_equilibrium.cache";
  const std::string key = cache_key(cfg);
  {
    std::ifstream in(path, std::ios::binary);
    std::string head;
    if (in && std::getline(in, head) && head == key) {
      EnsembleResult e;
      e.n = cfg.n;
      e.replicas = std::size_t(cfg.replicas);
      for (const auto& o : cfg.observables)
        for (double t : o.output_times) {
          e.column_obs.push_back(o.id);
          e.column_time.push_back(t);
        }
      e.data.resize(e.replicas * e.columns());
      in.read(reinterpret_cast<char*>(e.data.data()), std::streamsize(e.data.size() * sizeof(double)));
      if (in) {
        info("equilibrium ensemble loaded from %s", path.c_str());
        return e;
      }
    }
  }
  info("simulating equilibrium ensemble: n=%ld T=%g R=%ld", cfg.n, cfg.T, cfg.replicas);
  auto e = run_ensemble(cfg);
  std::ofstream out(path, std::ios::binary);
  out << key << "\n";
  out.write(reinterpret_cast<const char*>(e.data.data()), std::streamsize(e.data.size() * sizeof(double)));
  return e;
}

bool hurst_criterion(int c, const std::string& id, double lo, double hi) {
  auto e = equilibrium_ensemble();
  std::vector<double> v;
  for (double t : kDyadic) {
    auto x = column(e, id, t);
    auto ce = column_covariance(x, x);
    v.push_back(ce.cov);
    info("Var(%s(%g)) = %.6g +- %.2g", id.c_str(), t, ce.cov, ce.se);
  }
  auto fit = hurst_fit(kDyadic, v);
  char buf[200];
  std::snprintf(buf, sizeof buf, "log-log variance slope %.4f +- %.4f (H = %.3f), required [%g, %g]", fit.slope,
                fit.slope_se, fit.hurst(), lo, hi);
  return verdict(c, fit.slope >= lo && fit.slope <= hi, buf);
}

bool criterion1() { return hurst_criterion(1, "J", 0.4, 0.6); }
bool criterion2() { return hurst_criterion(2, "G", 1.35, 1.65); }

// ---------------------------------------------------------------------------

bool criterion3() {
  const long n = 100;
  ExperimentConfig cfg;
  cfg.profile = Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5);
  cfg.n = n;
  cfg.T = 1.0;
  cfg.replicas = reps(8000);
  cfg.seed = 33;
  std::vector<double> ts{0.5, 1.0};
  cfg.observables = {ObservableSpec::current(0, ts, "J0"), ObservableSpec::current(50, ts, "J50"),
                     ObservableSpec::occupation(0, ts, true, "G0"), ObservableSpec::occupation(50, ts, true, "G50")};
  auto e = run_ensemble(cfg);
  HeatField f(cfg.profile, n);
  int pass = 0, total = 0;
  const std::vector<std::pair<double, double>> st{{0.5, 0.5}, {0.5, 1.0}, {1.0, 1.0}};
  const std::vector<std::pair<double, double>> uu{{0.0, 0.0}, {0.0, 0.5}};
  auto id = [](const char* p, double u) { return std::string(p) + (u == 0.0 ? "0" : "50"); };
  for (auto kind : {LimitKind::JJ, LimitKind::GG, LimitKind::GJ})
    for (auto [u1, u2] : uu)
      for (auto [s, t] : st) {
        std::string a = kind == LimitKind::JJ ? id("J", u1) : id("G", u1);
        std::string b = kind == LimitKind::GG ? id("G", u2) : id("J", u2);
        const auto* ce = e.report.find(a, s, b, t);
        LimitValue lv = kind == LimitKind::JJ   ? cov_current_current(f, u1, s, u2, t)
                        : kind == LimitKind::GG ? cov_occupation_occupation(f, u1, s, u2, t)
                                                : cov_occupation_current(f, u1, s, u2, t);
        auto v = compare_mc_limit(ce->cov, ce->se, lv);
        ++total;
        pass += v.pass;
        info("%s u=(%g,%g) (s,t)=(%g,%g): mc %.5f +- %.5f limit %.5f z %.2f tol %.4f %s", to_string(kind).c_str(), u1, u2,
             s, t, v.mc, v.se, v.limit, v.z, v.tolerance, v.pass ? "PASS" : "FAIL");
      }
  return verdict(3, pass == total, std::to_string(pass) + "/" + std::to_string(total) + " JJ/GG/GJ comparisons pass");
}

bool criterion4() {
  HeatField f(Profile::constant(0.5), 100);
  bool ok = true;
  double worst_rel = 0, worst_z = 0;
  for (double t : kDyadic) {
    auto lv = cov_occupation_current(f, 0.0, t, 0.0, t);
    double big = 0;
    for (const auto& [name, x] : lv.term_breakdown) big = std::max(big, std::abs(x));
    double rel = big > 0 ? std::abs(lv.value) / big : std::abs(lv.value);
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel < 1e-6;
  }
  auto e = equilibrium_ensemble();
  for (double t : kDyadic) {
    auto ce = column_covariance(column(e, "G", t), column(e, "J", t));
    double z = std::abs(ce.cov) / ce.se;
    worst_z = std::max(worst_z, z);
    info("cov(G(%g), J(%g)) = %.5f +- %.5f", t, t, ce.cov, ce.se);
    ok = ok && z <= 3.0;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "limit |GJ|/largest term <= %.2e (< 1e-6), MC max |z| = %.2f (<= 3)", worst_rel, worst_z);
  return verdict(4, ok, buf);
}

bool criterion5() {
  HeatField f(Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5), 100);
  double jl = 0;
  for (double u : {0.0, 0.3})
    for (auto [s, t] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.0, 1.0}, {0.25, 2.0}})
      jl = std::max(jl, std::abs(cov_current_current(f, u, s, u, t).value - cov_current_jaralandim(f, u, s, t).value));
  info("max |JJ(u,u) - JL| = %.3e", jl);

  double forms = 0;
  auto H = TestFunction::triangle(0.0, 0.4), G = TestFunction::indicator(-0.2, 0.3);
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.25, 0.5}, {0.5, 1.0}})
    forms = std::max(forms, std::abs(cov_density_field(f, H, G, s, t).form_difference));
  info("max density-field form difference = %.3e", forms);

  HeatField eq(Profile::constant(0.3), 1);
  double fbm = 0;
  for (auto [s, t] : std::vector<std::pair<double, double>>{{0.25, 1.0}, {0.5, 2.0}, {1.0, 1.5}}) {
    double d = t - s;
    auto jj = [&](double a, double b) { return cov_current_current(eq, 0.0, a, 0.0, b).value; };
    auto gg = [&](double a, double b) { return cov_occupation_occupation(eq, 0.0, a, 0.0, b).value; };
    double j = jj(s, t), g = gg(s, t);
    fbm = std::max(fbm, std::abs(j - 0.5 * (jj(s, s) + jj(t, t) - jj(d, d))) / std::abs(j));
    fbm = std::max(fbm, std::abs(g - 0.5 * (gg(s, s) + gg(t, t) - gg(d, d))) / std::abs(g));
  }
  info("max relative stationary-increment defect = %.3e", fbm);
  char buf[200];
  std::snprintf(buf, sizeof buf, "JJ vs JL %.1e (<= 1e-6), forms %.1e (<= 1e-6), fBM structure %.1e (<= 1e-4)", jl, forms,
                fbm);
  return verdict(5, jl <= 1e-6 && forms <= 1e-6 && fbm <= 1e-4, buf);
}

bool criterion6() {
  const long n = 4, x0 = -5;
  const double t1 = 0.05, t2 = 0.1;
  const int L = 10;
  SmallSystem sys{L, n, x0};
  Profile p = Profile::tanh_ramp(0.2, 0.8, 0.0, 0.5);
  auto w = LatticeWindow::closed_system(n, x0, x0 + L - 1);
  auto rho1 = finite_density(sys, p, t1), rho2 = finite_density(sys, p, t2);
  const long R = reps(1e5);
  // every (i at t1, j at t2) pair and every same-time pair i < j at t2
  std::vector<MomentAccumulator> two(L * L, MomentAccumulator(1)), same(L * L, MomentAccumulator(1));
  std::vector<double> a(L), b(L);
  for (long rep = 0; rep < R; ++rep) {
    auto seed = replica_seed(606, std::uint64_t(rep));
    auto c = sample_initial_configuration(p, w, stream_seed(seed, 0));
    evolve(c, t1, {}, stream_seed(seed, 1));
    for (int i = 0; i < L; ++i) a[std::size_t(i)] = c.at(x0 + i) - rho1[std::size_t(i)];
    evolve(c, t2 - t1, {}, stream_seed(seed, 2));
    for (int i = 0; i < L; ++i) b[std::size_t(i)] = c.at(x0 + i) - rho2[std::size_t(i)];
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        two[std::size_t(i * L + j)].add({a[std::size_t(i)] * b[std::size_t(j)]});
        if (i < j) same[std::size_t(i * L + j)].add({b[std::size_t(i)] * b[std::size_t(j)]});
      }
  }
  double worst = 0;
  int checked = 0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      double ex = exact_correlation(sys, p, {t1, t2}, {{i}, {j}});
      const auto& m = two[std::size_t(i * L + j)];
      worst = std::max(worst, std::abs(m.mean(0) - ex) / std::sqrt(m.covariance(0, 0) / double(R)));
      ++checked;
      if (i < j) {
        double es = exact_correlation(sys, p, {t2}, {{i, j}});
        const auto& q = same[std::size_t(i * L + j)];
        worst = std::max(worst, std::abs(q.mean(0) - es) / std::sqrt(q.covariance(0, 0) / double(R)));
        ++checked;
      }
    }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d correlations, R=%ld, max |mc - exact|/SE = %.2f (<= 4)", checked, R, worst);
  return verdict(6, worst <= 4.0, buf);
}

bool criterion7() {
  std::vector<double> n2t;
  for (int j = -3; j <= 9; ++j) n2t.push_back(std::ldexp(1.0, j));
  bool ok = true;
  double worst_ratio = 0;
  bool trend = false;
  for (int k : {1, 2}) {
    std::vector<BoundPoint> pts;
    for (long n : {4L, 8L, 16L}) {
      LabelledSystem sys(k, 24, n);
      std::vector<double> times;
      for (double m : n2t) times.push_back(m / double(n * n));
      auto scan = gradient_scan(sys, times, 0);
      double ratio = scan.fitted_constant / scan.min_scaled;
      worst_ratio = std::max(worst_ratio, ratio);
      info("k=%d n=%ld: scaled sup in [%.3g, %.3g], max/min %.3g", k, n, scan.min_scaled, scan.fitted_constant, ratio);
      for (const auto& g : scan.points) pts.push_back({{double(n), g.n2t}, g.sup, 0.0});
    }
    auto bc = bound_check(
        pts, [k](const std::vector<double>& c) { return std::pow(c[1] + 1.0, -0.5 * double(k + 1)); }, {+1, +1},
        FitMode::exact);
    info("k=%d: fitted constant %.4f, growth trend %s", k, bc.C_fit, bc.any_trend ? "yes" : "no");
    trend = trend || bc.any_trend;
    ok = ok && !bc.any_trend;
  }
  ok = ok && worst_ratio <= 5.0;
  // the same quantity on the infinite lattice for one particle
  double zmax = 0, zmin = INFINITY;
  for (double m : n2t) {
    auto q = random_walk_kernel(2.0 * m);
    double sup = 0;
    for (long j = 0; j < long(q.w.size()); ++j) sup = std::max(sup, std::abs(q[j] - q[j + 1]));
    double sc = sup * (m + 1.0);
    zmax = std::max(zmax, sc);
    zmin = std::min(zmin, sc);
  }
  info("k=1 on Z (Bessel kernel): scaled sup in [%.3g, %.3g], max/min %.3g", zmin, zmax, zmax / zmin);
  char buf[200];
  std::snprintf(buf, sizeof buf, "24-site labelled systems: max/min %.3g (<= 5), growth trend %s", worst_ratio,
                trend ? "yes" : "no");
  return verdict(7, ok, buf);
}

bool criterion8() {
  const std::vector<double> n2t{0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0};
  const std::size_t R = std::size_t(reps(2e4));
  bool ok = true;
  double worst_z = 0;
  std::vector<double> C, Cse;
  std::vector<BoundPoint> pts;
  for (long n : {4L, 8L, 16L}) {
    std::vector<double> times;
    for (double m : n2t) times.push_back(m / double(n * n));
    auto tail = coupling_tau_tail(2, {0, 3}, 0, times, n, R, 800 + std::uint64_t(n));
    double c = 0, cse = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      auto m = meeting_time_oracle(times[i], n);
      double se = std::max(tail[i].se, 1.0 / double(R));
      double z = std::abs(tail[i].tail - m.tail) / se;
      worst_z = std::max(worst_z, z);
      ok = ok && z <= 4.0;
      double w = std::sqrt(n2t[i] + 1.0);
      if (tail[i].tail * w > c) {
        c = tail[i].tail * w;
        cse = tail[i].se * w;
      }
      pts.push_back({{double(n), n2t[i]}, tail[i].tail, tail[i].se});
      if (n == 4)
        info("n2t=%g: coupling %.5f +- %.5f, meeting walk %.5f", n2t[i], tail[i].tail, tail[i].se, m.tail);
    }
    info("n=%ld: fitted constant max tail*sqrt(n2t+1) = %.4f +- %.4f", n, c, cse);
    C.push_back(c);
    Cse.push_back(cse);
  }
  bool stable = true;
  for (std::size_t i = 0; i + 1 < C.size(); ++i)
    stable = stable && std::abs(C[i + 1] - C[i]) <= 4.0 * std::hypot(Cse[i], Cse[i + 1]);
  auto bc = bound_check(
      pts, [](const std::vector<double>& c) { return 1.0 / std::sqrt(c[1] + 1.0); }, {+1, +1}, FitMode::noisy);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "coupling vs meeting walk max |z| %.2f (<= 4); constants under n-doubling %s; bound ratio trend %s",
                worst_z, stable ? "stable" : "unstable", bc.any_trend ? "yes" : "no");
  return verdict(8, ok && stable && !bc.any_trend, buf);
}

bool criterion9() {
  Profile p = Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5);
  const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625, 0.03125};
  const std::vector<std::pair<double, double>> st{{0.0, 0.25}};
  const long R = reps(2000);
  // epsilon exponent at n = 100
  auto rows = kv_experiment(p, {100}, eps, st, R, 909);
  std::vector<double> ee, est;
  for (const auto& r : rows) {
    ee.push_back(r.eps_eff);
    est.push_back(r.estimate);
    info("n=100 l=%ld eps_eff=%.4f: E = %.4e +- %.1e, ratio to bound %.4f", r.ell, r.eps_eff, r.estimate, r.se, r.ratio);
  }
  auto fit = hurst_fit(ee, est);
  info("epsilon exponent at n=100: %.3f +- %.3f", fit.slope, fit.slope_se);
  // n-doubling at block lengths of at least 8 sites
  auto dbl = kv_experiment(p, {64, 128}, {0.5, 0.25, 0.125}, st, R, 910);
  double wsum = 0, bsum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto &a = dbl[i], &b = dbl[i + 3];
    double lb = std::log2(b.estimate / a.estimate);
    double se = std::hypot(a.se / a.estimate, b.se / b.estimate) / std::log(2.0);
    info("eps=%g: E(128)/E(64) = %.4f, n-exponent %.3f +- %.3f", a.eps, b.estimate / a.estimate, lb, se);
    wsum += 1.0 / (se * se);
    bsum += lb / (se * se);
  }
  double b = bsum / wsum, bse = 1.0 / std::sqrt(wsum);
  bool decay = std::abs(b + 1.0) <= 1.96 * bse;
  info("pooled n-exponent %.3f +- %.3f (95%% CI must contain -1)", b, bse);
  std::vector<BoundPoint> pts;
  std::vector<KvRow> all = rows;
  all.insert(all.end(), dbl.begin(), dbl.end());
  for (const auto& r : all) pts.push_back({{double(r.n), r.eps_eff}, r.estimate, r.se});
  auto bc = bound_check(
      pts, [](const std::vector<double>& c) { return kv_bound(0.0, 0.25, c[1], long(c[0])); }, {+1, -1},
      FitMode::noisy);
  info("fitted constant %.4f", bc.C_fit);
  char buf[240];
  std::snprintf(buf, sizeof buf, "eps exponent %.3f (>= 0.6), n-exponent %.3f +- %.3f (1/n %s), upward ratio trend %s",
                fit.slope, b, bse, decay ? "consistent" : "inconsistent", bc.any_trend ? "yes" : "no");
  return verdict(9, fit.slope >= 0.6 && decay && !bc.any_trend, buf);
}

bool criterion10() {
  // all distinct pairs in u in [-1, 1]; the strong ramp keeps |phi| well above the noise
  Profile p = Profile::tanh_ramp(0.1, 0.9, 0.0, 0.5);
  std::vector<double> ln, lphi;
  for (long n : {25L, 50L, 100L}) {
    auto pa = pair_correlation_average(p, n, 0.5, -1.0, 1.0, 2.0, reps(n == 25 ? 2e4 : 1e4), 1000 + std::uint64_t(n));
    info("n=%ld: pair-averaged phi = %.4e +- %.1e over %zu pairs", n, pa.estimate, pa.se, pa.pairs);
    ln.push_back(std::log(double(n)));
    lphi.push_back(std::log(std::abs(pa.estimate)));
  }
  double mx = (ln[0] + ln[1] + ln[2]) / 3, my = (lphi[0] + lphi[1] + lphi[2]) / 3, sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (ln[std::size_t(i)] - mx) * (lphi[std::size_t(i)] - my);
    sxx += (ln[std::size_t(i)] - mx) * (ln[std::size_t(i)] - mx);
  }
  double slope = sxy / sxx;
  char buf[200];
  std::snprintf(buf, sizeof buf, "log-log slope of |phi| vs n = %.3f, required [-1.3, -0.7]", slope);
  return verdict(10, slope >= -1.3 && slope <= -0.7, buf);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion11() {
  fs::path root = fs::temp_directory_path() / "ssep_acceptance_manifest";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "cfg.json") << R"({
  "profile": {"kind": "tanh", "params": {"a": 0.3, "b": 0.7, "center": 0, "width": 0.5}},
  "n": 20, "T": 0.5, "replicas": 300, "seed": 1111, "threads": 2,
  "observables": [
    {"kind": "current", "id": "J", "site": 0, "times": [0.25, 0.5]},
    {"kind": "occupation", "id": "G", "site": 0, "times": [0.25, 0.5]},
    {"kind": "density_field", "id": "Y", "times": [0.5], "test_function": {"kind": "triangle", "center": 0, "half_width": 0.3}}
  ],
  "targets": [{"obs_i": "J", "obs_j": "J", "s": 0.5, "t": 0.5}]
})";
  const std::string cfg = (root / "cfg.json").string();
  const std::vector<std::vector<std::string>> runs{
      {"simulate", "--config", cfg},
      {"compare", "--config", cfg},
      {"kv", "--tanh", "0.3", "0.7", "0", "0.5", "--n", "20", "--eps", "0.5", "0.25", "--s", "0", "--t", "0.25",
       "--replicas", "200"},
      {"oracle", "coupling", "--k", "1", "--n", "4", "--times", "0.1", "1", "--replicas", "500"},
      {"limit", "--kind", "jj", "--tanh", "0.3", "0.7", "0", "0.5", "--surface", "0.5", "1"}};
  int files = 0;
  bool ok = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    fs::path a = root / ("a" + std::to_string(i)), b = root / ("b" + std::to_string(i));
    auto args = runs[i];
    args.push_back("--out");
    args.push_back(a.string());
    std::streambuf* old = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf(sink.rdbuf());
    int rc1 = cli::dispatch(args);
    int rc2 = cli::dispatch({"--manifest", (a / "manifest.json").string(), "--out", b.string()});
    std::cout.rdbuf(old);
    if (rc1 > 1 || rc1 != rc2) {
      info("%s: exit codes %d / %d", runs[i][0].c_str(), rc1, rc2);
      ok = false;
      continue;
    }
    for (const auto& ent : fs::directory_iterator(a)) {
      if (ent.path().extension() != ".csv") continue;
      ++files;
      bool same = slurp(ent.path()) == slurp(b / ent.path().filename());
      if (!same) info("%s differs on rerun", ent.path().filename().c_str());
      ok = ok && same;
    }
  }
  return verdict(11, ok && files > 0, std::to_string(files) + " CSV outputs from 5 subcommands compared byte-for-byte");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<bool()>> crit{
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4},   {"5", criterion5},  {"6", criterion6},
      {"7", criterion7}, {"8", criterion8}, {"9", criterion9}, {"10", criterion10}, {"11", criterion11}};
  std::vector<std::string> which;
  for (int i = 1; i < argc; ++i) which.push_back(argv[i]);
  if (which.empty() || which[0] == "all")
    which = {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"};
  if (scale() != 1.0) std::printf("  INFO replica counts scaled by %g\n", scale());
  bool all = true;
  for (const auto& w : which) {
    auto it = crit.find(w);
    if (it == crit.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
      return 2;
    }
    auto t0 = std::chrono::steady_clock::now();
    bool ok;
    try {
      ok = it->second();
    } catch (const std::exception& e) {
      ok = verdict(std::stoi(w), false, std::string("error: ") + e.what());
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    info("criterion %s took %.1f s", w.c_str(), sec);
    all = all && ok;
  }
  return all ? 0 : 1;
}
