#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssep/config.hpp"
#include "ssep/error.hpp"
#include "ssep/exact_oracle.hpp"
#include "ssep/limit_gaussian.hpp"
#include "ssep/mc_lab.hpp"

namespace ssep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failed PASS criteria in `compare`.
struct CompareFailed {};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string config, out, manifest;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string kind;
  std::optional<double> equilibrium;
  std::vector<double> tanh;
  std::optional<double> rel_tol, cutoff;
  // limit / oracle
  double s = 1, t = 1, u1 = 0, u2 = 0;
  std::vector<double> surface;
  int k = 1, sites = 16;
  std::vector<long> n_list;
  std::vector<double> times;
  std::vector<long> start, from, to;
  long replicas = 0;
  long M = 0;
  int x1 = 0, x2 = 1;
  std::vector<double> eps;
  std::string oracle_kind;
};

struct Run {
  std::string command;
  std::vector<std::string> args;
  Options o;
  std::optional<ParsedConfig> pc;
  std::string config_text;
  std::vector<std::string> outputs;

  fs::path out_dir() const { return o.out.empty() ? fs::path() : fs::path(o.out); }

  void write(const std::string& name, const std::string& content) {
    if (o.out.empty()) return;
    std::ofstream f(out_dir() / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::config_error, "cannot write '" + (out_dir() / name).string() + "'");
    f << content;
    outputs.push_back(name);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config_error, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<Profile> flag_profile(const Options& o) {
  if (o.equilibrium && !o.tanh.empty()) throw Error(ErrorCode::config_error, "give either --equilibrium or --tanh");
  if (o.equilibrium) return profile_from_params("constant", {{"rho", *o.equilibrium}});
  if (!o.tanh.empty())
    return profile_from_params("tanh", {{"a", o.tanh[0]}, {"b", o.tanh[1]}, {"center", o.tanh[2]}, {"width", o.tanh[3]}});
  return std::nullopt;
}

QuadratureSettings apply_quad(QuadratureSettings q, const Options& o) {
  if (o.rel_tol) q.rel_tol = *o.rel_tol;
  if (o.cutoff) q.cutoff = *o.cutoff;
  try {
    q.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
  return q;
}

// Loads --config (if any) and applies flag overrides to the experiment.
ExperimentConfig experiment(Run& run) {
  ExperimentConfig cfg;
  if (!run.o.config.empty()) {
    run.config_text = read_file(run.o.config);
    run.pc = parse_config_text(run.config_text, run.o.config);
    cfg = run.pc->experiment;
  }
  if (auto p = flag_profile(run.o)) {
    cfg.profile = *p;
    for (auto& tg : cfg.targets) tg.request.profile = *p;
  }
  cfg.quad = apply_quad(cfg.quad, run.o);
  for (auto& tg : cfg.targets) tg.request.quad = cfg.quad;
  if (run.o.seed) cfg.seed = *run.o.seed;
  if (run.o.threads) cfg.threads = *run.o.threads;
  if (run.o.replicas > 0) cfg.replicas = run.o.replicas;
  if (!run.o.n_list.empty()) {
    if (run.o.n_list.size() == 1) cfg.n = run.o.n_list[0];
    else cfg.n_list = run.o.n_list;
  }
  return cfg;
}

std::string covariance_csv(const CovarianceReport& rep) {
  std::string s = "obs_i,obs_j,s,t,cov,se,R\n";
  for (const auto& e : rep.entries)
    s += e.obs_i + "," + e.obs_j + "," + num(e.s) + "," + num(e.t) + "," + num(e.cov) + "," + num(e.se) + "," +
         std::to_string(e.R) + "\n";
  return s;
}

std::string trajectories_csv(const EnsembleResult& e) {
  std::string s = "replica_id,observable_id,time,value\n";
  for (std::size_t r = 0; r < e.replicas; ++r)
    for (std::size_t c = 0; c < e.columns(); ++c)
      s += std::to_string(r) + "," + e.column_obs[c] + "," + num(e.column_time[c]) + "," + num(e.at(r, c)) + "\n";
  return s;
}

json summary_json(const EnsembleResult& e) {
  json means = json::array();
  for (std::size_t c = 0; c < e.columns(); ++c)
    means.push_back({{"observable_id", e.column_obs[c]}, {"time", e.column_time[c]}, {"mean", e.means[c]}});
  return {{"n", e.n},
          {"replicas", e.replicas},
          {"events", e.events},
          {"boundary_touches", e.boundary_touches},
          {"window", {e.window.x_lo, e.window.x_hi}},
          {"centring_error", e.centring_error},
          {"means", means}};
}

json limit_json(const LimitRequest& r, const LimitValue& v) {
  json terms = json::object();
  for (const auto& [k, x] : v.term_breakdown) terms[k] = x;
  json p = {{"profile", r.profile.kind_name()}, {"profile_params", r.profile.params()}, {"u1", r.u1}, {"u2", r.u2},
            {"s", r.s}, {"t", r.t}, {"rel_tol", r.quad.rel_tol}, {"cutoff", r.quad.cutoff}};
  json j = {{"kind", to_string(r.kind)}, {"params", p}, {"value", v.value}, {"error_estimate", v.error_estimate},
            {"term_breakdown", terms}};
  if (r.kind == LimitKind::YY) {
    j["form0"] = v.form0;
    j["form1"] = v.form1;
    j["form_difference"] = v.form_difference;
  }
  return j;
}

int cmd_simulate(Run& run) {
  auto cfg = experiment(run);
  std::vector<long> ns = cfg.n_list.empty() ? std::vector<long>{cfg.n} : cfg.n_list;
  json summaries = json::array();
  for (long n : ns) {
    auto res = run_ensemble(cfg, n);
    std::string suffix = ns.size() > 1 ? "_n" + std::to_string(n) : "";
    run.write("trajectories" + suffix + ".csv", trajectories_csv(res));
    run.write("covariance" + suffix + ".csv", covariance_csv(res.report));
    summaries.push_back(summary_json(res));
  }
  std::string s = summaries.dump(2) + "\n";
  run.write("summary.json", s);
  if (run.o.out.empty()) std::cout << s;
  return 0;
}

int cmd_limit(Run& run) {
  LimitRequest req;
  if (!run.o.config.empty()) {
    run.config_text = read_file(run.o.config);
    run.pc = parse_config_text(run.config_text, run.o.config);
    if (run.pc->limit) req = *run.pc->limit;
    else req.profile = run.pc->experiment.profile;
    req.quad = run.pc->experiment.quad;
  }
  bool from_flags = !(run.pc && run.pc->limit);
  if (auto p = flag_profile(run.o)) req.profile = *p;
  else if (from_flags && !run.pc) throw Error(ErrorCode::config_error, "limit needs --config, --equilibrium or --tanh");
  if (!run.o.kind.empty()) {
    try {
      req.kind = limit_kind_from_string(run.o.kind);
    } catch (const Error& e) {
      throw Error(ErrorCode::config_error, e.what());
    }
  } else if (from_flags) {
    throw Error(ErrorCode::config_error, "limit needs --kind");
  }
  if (from_flags) {
    req.s = run.o.s;
    req.t = run.o.t;
    req.u1 = run.o.u1;
    req.u2 = run.o.u2;
  }
  if (req.kind == LimitKind::YY && req.H.empty() && req.G.empty())
    throw Error(ErrorCode::config_error, "kind yy needs test functions H and G in the config 'limit' section");
  req.quad = apply_quad(req.quad, run.o);
  if (!run.o.surface.empty()) {
    std::string csv = "s,t,value,error_estimate\n";
    for (double s : run.o.surface)
      for (double t : run.o.surface) {
        LimitRequest r = req;
        r.s = s;
        r.t = t;
        if (r.kind == LimitKind::YY && s > t) continue;
        auto v = evaluate(r);
        csv += num(s) + "," + num(t) + "," + num(v.value) + "," + num(v.error_estimate) + "\n";
      }
    run.write("surface.csv", csv);
    if (run.o.out.empty()) std::cout << csv;
    return 0;
  }
  auto v = evaluate(req);
  std::string s = limit_json(req, v).dump(2) + "\n";
  run.write("limit.json", s);
  std::cout << s;
  return 0;
}

int cmd_compare(Run& run) {
  auto cfg = experiment(run);
  if (cfg.targets.empty()) throw Error(ErrorCode::config_error, "compare needs 'targets' in the config");
  auto res = run_ensemble(cfg, cfg.n);
  run.write("covariance.csv", covariance_csv(res.report));
  json verdicts = json::array();
  bool all = true;
  for (const auto& tg : cfg.targets) {
    const auto* e = res.report.find(tg.obs_i, tg.s, tg.obs_j, tg.t);
    if (!e)
      throw Error(ErrorCode::config_error, "target (" + tg.obs_i + "@" + num(tg.s) + ", " + tg.obs_j + "@" + num(tg.t) +
                                               ") has no matching output times");
    auto lv = evaluate(tg.request);
    auto v = compare_mc_limit(e->cov, e->se, lv);
    all = all && v.pass;
    verdicts.push_back({{"kind", to_string(tg.request.kind)}, {"obs_i", tg.obs_i}, {"obs_j", tg.obs_j}, {"s", tg.s},
                        {"t", tg.t}, {"mc", v.mc}, {"se", v.se}, {"limit", v.limit}, {"limit_error", v.limit_error},
                        {"z", v.z}, {"tolerance", v.tolerance}, {"verdict", v.pass ? "PASS" : "FAIL"}});
  }
  json out = {{"n", res.n}, {"replicas", res.replicas}, {"all_pass", all}, {"verdicts", verdicts}};
  std::string s = out.dump(2) + "\n";
  run.write("verdicts.json", s);
  std::cout << s;
  if (!all) throw CompareFailed{};
  return 0;
}

int cmd_hurst(Run& run) {
  ExperimentConfig cfg;
  if (run.o.config.empty()) {
    // equilibrium default: current and occupation time at bond/site 0 on a dyadic grid
    std::vector<double> ts = {0.125, 0.25, 0.5, 1.0, 2.0};
    cfg.profile = Profile::constant(0.5);
    cfg.T = 2.0;
    cfg.observables = {ObservableSpec::current(0, ts, "J0"), ObservableSpec::occupation(0, ts, true, "G0")};
  }
  ExperimentConfig over = experiment(run);
  if (run.o.config.empty()) {
    over.T = cfg.T;
    over.observables = cfg.observables;
    if (!run.o.equilibrium && run.o.tanh.empty()) over.profile = cfg.profile;
  }
  cfg = over;
  auto res = run_ensemble(cfg, cfg.n);
  std::string table = "observable_id,time,variance,se\n";
  json fits = json::array();
  for (const auto& o : cfg.observables) {
    std::vector<double> ts, vs;
    for (double t : o.output_times) {
      const auto* e = res.report.find(o.id, t, o.id, t);
      table += o.id + "," + num(t) + "," + num(e->cov) + "," + num(e->se) + "\n";
      ts.push_back(t);
      vs.push_back(e->cov);
    }
    if (ts.size() < 4) continue;
    auto f = hurst_fit(ts, vs);
    fits.push_back({{"observable_id", o.id}, {"slope", f.slope}, {"slope_se", f.slope_se}, {"intercept", f.intercept},
                    {"hurst", f.hurst()}});
  }
  run.write("fit_table.csv", table);
  std::string s = json({{"n", res.n}, {"replicas", res.replicas}, {"fits", fits}}).dump(2) + "\n";
  run.write("hurst.json", s);
  std::cout << s;
  return 0;
}

int cmd_kv(Run& run) {
  auto cfg = experiment(run);
  if (run.o.config.empty() && !flag_profile(run.o)) cfg.profile = Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5);
  std::vector<long> ns = cfg.n_list.empty() ? std::vector<long>{cfg.n} : cfg.n_list;
  std::vector<double> eps = run.o.eps;
  if (eps.empty()) eps = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  if (!(run.o.t > run.o.s)) throw Error(ErrorCode::config_error, "kv needs --t > --s");
  auto rows = kv_experiment(cfg.profile, ns, eps, {{run.o.s, run.o.t}}, cfg.replicas, cfg.seed, cfg.threads,
                            cfg.margin_factor);
  std::string csv = "n,ell,eps,eps_eff,s,t,estimate,se,bound,ratio\n";
  std::vector<BoundPoint> pts;
  for (const auto& r : rows) {
    csv += std::to_string(r.n) + "," + std::to_string(r.ell) + "," + num(r.eps) + "," + num(r.eps_eff) + "," +
           num(r.s) + "," + num(r.t) + "," + num(r.estimate) + "," + num(r.se) + "," + num(r.bound) + "," +
           num(r.ratio) + "\n";
    if (r.ell > 1) pts.push_back({{double(r.n), r.eps_eff}, r.estimate, r.se});
  }
  run.write("kv.csv", csv);
  json out = {{"rows", rows.size()}};
  if (!pts.empty()) {
    double s = run.o.s, t = run.o.t;
    auto bc = bound_check(
        pts, [&](const std::vector<double>& c) { return kv_bound(s, t, c[1], long(c[0])); }, {+1, -1},
        FitMode::noisy);
    json trends = json::array();
    for (const auto& tf : bc.trends)
      trends.push_back({{"axis", tf.axis == 0 ? "n" : "eps"}, {"fixed", tf.fixed}, {"slope", tf.slope},
                        {"p_value", tf.p_value}, {"growth", tf.growth}});
    out["C_fit"] = bc.C_fit;
    out["any_trend"] = bc.any_trend;
    out["trends"] = trends;
  }
  std::string s = out.dump(2) + "\n";
  run.write("kv.json", s);
  std::cout << s;
  return 0;
}

std::vector<double> default_grad_times(long n) {
  std::vector<double> ts;
  for (int e = -3; e <= 9; ++e) ts.push_back(std::ldexp(1.0, e) / double(n * n));
  return ts;
}

int cmd_oracle(Run& run) {
  const auto& o = run.o;
  std::optional<OracleRequest> req;
  if (!o.config.empty()) {
    run.config_text = read_file(o.config);
    run.pc = parse_config_text(run.config_text, o.config);
    req = run.pc->oracle;
  }
  OracleRequest r = req.value_or(OracleRequest{});
  if (!o.oracle_kind.empty()) r.kind = o.oracle_kind;
  if (!req) {
    r.k = o.k;
    r.sites = o.sites;
    if (!o.n_list.empty()) r.n = o.n_list[0];
    r.times = o.times;
    r.start = o.start;
    if (o.replicas > 0) r.replicas = o.replicas;
    r.M = o.M;
  }
  if (o.seed) r.seed = *o.seed;
  json out = {{"kind", r.kind}, {"n", r.n}};
  std::string csv;
  if (r.kind == "grad") {
    LabelledSystem sys(r.k, r.sites, r.n);
    auto ts = r.times.empty() ? default_grad_times(r.n) : r.times;
    json rows = json::array();
    csv = "k,n,coordinate,t,n2t,sup,scaled\n";
    for (int c = 0; c < r.k; ++c) {
      auto sc = gradient_scan(sys, ts, c);
      for (const auto& p : sc.points) {
        rows.push_back({{"coordinate", c}, {"t", p.t}, {"n2t", p.n2t}, {"sup", p.sup}, {"scaled", p.scaled}});
        csv += std::to_string(r.k) + "," + std::to_string(r.n) + "," + std::to_string(c) + "," + num(p.t) + "," +
               num(p.n2t) + "," + num(p.sup) + "," + num(p.scaled) + "\n";
      }
      out["fitted_constant_" + std::to_string(c)] = sc.fitted_constant;
    }
    out["k"] = r.k;
    out["sites"] = r.sites;
    out["scan"] = rows;
  } else if (r.kind == "meeting" || r.kind == "coupling") {
    auto ts = r.times.empty() ? std::vector<double>{0.1, 0.5, 1, 4, 16, 64} : r.times;
    if (r.times.empty())
      for (auto& t : ts) t /= double(r.n * r.n);
    std::vector<TailEstimate> mc;
    if (r.kind == "coupling") {
      std::vector<long> start = r.start;
      if (start.empty())
        for (int j = 0; j < r.k; ++j) start.push_back(3 * j);
      mc = coupling_tau_tail(r.k, start, 0, ts, r.n, std::size_t(r.replicas), r.seed);
    }
    json rows = json::array();
    csv = r.kind == "coupling" ? "t,n2t,oracle,mc,se\n" : "t,n2t,tail,boundary_mass\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto m = meeting_time_oracle(ts[i], r.n, r.M);
      double n2t = ts[i] * double(r.n * r.n);
      json row = {{"t", ts[i]}, {"n2t", n2t}, {"tail", m.tail}, {"boundary_mass", m.boundary_mass}};
      if (r.kind == "coupling") {
        row["mc"] = mc[i].tail;
        row["se"] = mc[i].se;
        csv += num(ts[i]) + "," + num(n2t) + "," + num(m.tail) + "," + num(mc[i].tail) + "," + num(mc[i].se) + "\n";
      } else {
        csv += num(ts[i]) + "," + num(n2t) + "," + num(m.tail) + "," + num(m.boundary_mass) + "\n";
      }
      rows.push_back(row);
    }
    out["rows"] = rows;
  } else if (r.kind == "correlation") {
    SmallSystem sys;
    sys.sites = r.sites;
    sys.n = r.n;
    sys.x0 = -r.sites / 2;
    Profile prof = Profile::tanh_ramp(0.3, 0.7, 0.0, 0.5);
    if (run.pc && run.pc->experiment.observables.empty() && !run.config_text.empty()) prof = run.pc->experiment.profile;
    if (auto p = flag_profile(o)) prof = *p;
    double phi = exact_correlation(sys, prof, {o.s, o.t}, {{o.x1}, {o.x2}});
    out["sites"] = r.sites;
    out["x1"] = o.x1;
    out["x2"] = o.x2;
    out["s"] = o.s;
    out["t"] = o.t;
    out["phi"] = phi;
    csv = "x1,x2,s,t,phi\n" + std::to_string(o.x1) + "," + std::to_string(o.x2) + "," + num(o.s) + "," + num(o.t) +
          "," + num(phi) + "\n";
  } else if (r.kind == "lex") {
    LabelledSystem sys(r.k, r.sites, r.n);
    std::vector<int> x(o.from.begin(), o.from.end()), y(o.to.begin(), o.to.end());
    if (int(x.size()) != r.k || int(y.size()) != r.k)
      throw Error(ErrorCode::config_error, "lex needs --from and --to with k coordinates");
    double p = sys.lex_transition(x, y, o.t);
    out["k"] = r.k;
    out["t"] = o.t;
    out["p"] = p;
    csv = "t,p\n" + num(o.t) + "," + num(p) + "\n";
  } else {
    throw Error(ErrorCode::config_error, "unknown oracle kind '" + r.kind + "' (grad|meeting|coupling|correlation|lex)");
  }
  run.write("oracle.csv", csv);
  std::string s = out.dump(2) + "\n";
  run.write("oracle.json", s);
  std::cout << s;
  return 0;
}

void write_manifest(Run& run) {
  if (run.o.out.empty()) return;
  json m = {{"tool", "ssep"},
            {"version", kVersion},
            {"command", run.command},
            {"args", run.args},
            {"config_path", run.o.config.empty() ? json(nullptr) : json(run.o.config)},
            {"config_text", run.config_text.empty() ? json(nullptr) : json(run.config_text)},
            {"resolved_config", run.pc ? json::parse(run.pc->resolved) : json(nullptr)},
            {"seed", run.pc ? json(run.o.seed.value_or(run.pc->experiment.seed))
                            : (run.o.seed ? json(*run.o.seed) : json(nullptr))},
            {"outputs", run.outputs}};
  if (!run.config_text.empty()) {
    std::ofstream f(run.out_dir() / "config.json", std::ios::binary);
    f << run.config_text;
  }
  std::ofstream f(run.out_dir() / "manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::resource_cap:
    case ErrorCode::quadrature_failure:
    case ErrorCode::system_too_large:
    case ErrorCode::boundary_mass_too_large: return 3;
    default: return 2;
  }
}

// Re-executes a manifest. The stored config text is written next to the new
// outputs and used in place of the original path.
int rerun(const std::string& manifest, const std::string& out) {
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, "manifest '" + manifest + "' is not valid JSON");
  }
  if (!m.contains("args") || !m.contains("command")) throw Error(ErrorCode::config_error, "manifest lacks 'args'");
  auto args = m.at("args").get<std::vector<std::string>>();
  if (out.empty()) throw Error(ErrorCode::config_error, "rerun needs --out");
  fs::create_directories(out);
  if (m.contains("config_text") && m.at("config_text").is_string()) {
    std::string cfg = (fs::path(out) / "config.json").string();
    std::ofstream(cfg, std::ios::binary) << m.at("config_text").get<std::string>();
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") args[i + 1] = cfg;
  }
  args.push_back("--out");
  args.push_back(out);
  return dispatch(args);
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Stirring-process fluctuation lab: simulation, limit covariances, exact oracles"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);
  Options o;
  std::string top_manifest, top_out;
  app.add_option("--manifest", top_manifest, "rerun from a manifest.json");
  app.add_option("--out", top_out, "output directory for --manifest reruns");

  auto common = [&](CLI::App* sc) {
    sc->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sc->add_option("--out", o.out, "output directory");
    sc->add_option("--seed", o.seed, "master seed");
    sc->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    sc->add_option("--equilibrium", o.equilibrium, "constant profile rho");
    sc->add_option("--tanh", o.tanh, "tanh-ramp profile: a b center width")->expected(4);
    sc->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sc->add_option("--cutoff", o.cutoff, "spatial truncation in units of sqrt(2T)");
    sc->add_option("--n", o.n_list, "scaling parameter(s)");
    sc->add_option("--replicas", o.replicas, "replica count");
  };
  auto* sim = app.add_subcommand("simulate", "run an ensemble, write trajectories and covariances");
  common(sim);
  auto* lim = app.add_subcommand("limit", "evaluate a limit covariance");
  common(lim);
  lim->add_option("--kind", o.kind, "jj | gg | gj | jl | yy");
  lim->add_option("--s", o.s);
  lim->add_option("--t", o.t);
  lim->add_option("--u1", o.u1);
  lim->add_option("--u2", o.u2);
  lim->add_option("--surface", o.surface, "time grid; writes the (s,t) covariance surface");
  auto* cmp = app.add_subcommand("compare", "Monte Carlo against limit targets");
  common(cmp);
  auto* orc = app.add_subcommand("oracle", "exact small-system computations");
  common(orc);
  orc->add_option("scan", o.oracle_kind, "grad | meeting | coupling | correlation | lex");
  orc->add_option("--kind", o.oracle_kind, "same as the positional kind");
  orc->add_option("--k", o.k, "labelled particles");
  orc->add_option("--sites", o.sites, "system size");
  orc->add_option("--times", o.times, "time grid");
  orc->add_option("--start", o.start, "coupling start positions");
  orc->add_option("--M", o.M, "meeting walk cutoff (0 = automatic)");
  orc->add_option("--from", o.from, "lex: start positions");
  orc->add_option("--to", o.to, "lex: end positions");
  orc->add_option("--x1", o.x1, "correlation: first site index (time s)");
  orc->add_option("--x2", o.x2, "correlation: second site index (time t)");
  orc->add_option("--s", o.s);
  orc->add_option("--t", o.t);
  auto* hur = app.add_subcommand("hurst", "variance scaling fits");
  common(hur);
  auto* kv = app.add_subcommand("kv", "block-replacement experiment");
  common(kv);
  kv->add_option("--eps", o.eps, "block fractions");
  kv->add_option("--s", o.s);
  kv->add_option("--t", o.t);

  std::vector<const char*> argv{"ssep"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (!top_manifest.empty()) return rerun(top_manifest, top_out);
    CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];
    if (!sub) {
      std::cerr << app.help();
      return 2;
    }
    Run run;
    run.command = sub->get_name();
    run.o = o;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out") {
        ++i;
        continue;
      }
      run.args.push_back(args[i]);
    }
    if (!o.out.empty()) fs::create_directories(o.out);
    int rc = 0;
    try {
      if (run.command == "simulate") rc = cmd_simulate(run);
      else if (run.command == "limit") rc = cmd_limit(run);
      else if (run.command == "compare") rc = cmd_compare(run);
      else if (run.command == "oracle") rc = cmd_oracle(run);
      else if (run.command == "hurst") rc = cmd_hurst(run);
      else if (run.command == "kv") rc = cmd_kv(run);
    } catch (const CompareFailed&) {
      rc = 1;
    }
    write_manifest(run);
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace ssep::cli
