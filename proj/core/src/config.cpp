#include "ssep/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ssep/error.hpp"

namespace ssep {

using nlohmann::json;

namespace {

struct Reader {
  const std::string& text;

  long line_of(const std::string& key) const {
    auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + long(std::count(text.begin(), text.begin() + long(pos), '\n'));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    long l = line_of(key);
    throw Error(ErrorCode::config_error, (l > 0 ? "line " + std::to_string(l) + ": " : std::string()) + msg);
  }

  void allow(const json& obj, const std::string& where, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(where, "'" + where + "' must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) fail(it.key(), "unknown key '" + it.key() + "' in " + where);
  }

  template <class T>
  T get(const json& obj, const std::string& key, T def) const {
    if (!obj.contains(key)) return def;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "key '" + key + "' has the wrong type");
    }
  }

  template <class T>
  T need(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.contains(key)) fail(where, "missing key '" + key + "' in " + where);
    return get<T>(obj, key, T{});
  }
};

TestFunction read_test_function(const Reader& rd, const json& j, const std::string& where) {
  rd.allow(j, where, {"kind", "a", "b", "center", "half_width", "height", "u", "K"});
  auto kind = rd.need<std::string>(j, "kind", where);
  if (kind == "zero") return TestFunction::zero();
  if (kind == "indicator") return TestFunction::indicator(rd.need<double>(j, "a", where), rd.need<double>(j, "b", where));
  if (kind == "triangle")
    return TestFunction::triangle(rd.need<double>(j, "center", where), rd.need<double>(j, "half_width", where),
                                  rd.get<double>(j, "height", 1.0));
  if (kind == "clipped_ramp") return TestFunction::clipped_ramp(rd.need<double>(j, "u", where), rd.need<double>(j, "K", where));
  rd.fail("kind", "unknown test function kind '" + kind + "'");
}

Profile read_profile(const Reader& rd, const json& j) {
  rd.allow(j, "profile", {"kind", "params"});
  auto kind = rd.need<std::string>(j, "kind", "profile");
  json p = j.contains("params") ? j.at("params") : json::object();
  auto open_unit = [&](const std::string& key, double v) {
    if (!(v > 0.0 && v < 1.0))
      rd.fail(key, "profile value '" + key + "' = " + std::to_string(v) + " must lie in the open interval (0,1)");
  };
  try {
    if (kind == "constant") {
      rd.allow(p, "profile.params", {"rho"});
      double r = rd.need<double>(p, "rho", "profile.params");
      open_unit("rho", r);
      return Profile::constant(r);
    }
    if (kind == "tanh") {
      rd.allow(p, "profile.params", {"a", "b", "center", "width"});
      double a = rd.need<double>(p, "a", "profile.params"), b = rd.need<double>(p, "b", "profile.params");
      open_unit("a", a);
      open_unit("b", b);
      return Profile::tanh_ramp(a, b, rd.get<double>(p, "center", 0.0), rd.get<double>(p, "width", 1.0));
    }
    if (kind == "piecewise_linear" || kind == "table") {
      rd.allow(p, "profile.params", {"u", "rho"});
      auto u = rd.need<std::vector<double>>(p, "u", "profile.params");
      auto r = rd.need<std::vector<double>>(p, "rho", "profile.params");
      if (u.size() != r.size()) rd.fail("u", "profile tables 'u' and 'rho' differ in length");
      for (double v : r) open_unit("rho", v);
      if (kind == "table") return Profile::custom_table(u, r);
      std::vector<std::pair<double, double>> knots;
      for (std::size_t i = 0; i < u.size(); ++i) knots.emplace_back(u[i], r[i]);
      return Profile::piecewise_linear(knots);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_error) throw;
    rd.fail("profile", std::string("invalid profile: ") + e.what());
  }
  rd.fail("kind", "unknown profile kind '" + kind + "'");
}

ObservableSpec::Kind observable_kind(const Reader& rd, const std::string& s) {
  if (s == "current") return ObservableSpec::Kind::current;
  if (s == "occupation") return ObservableSpec::Kind::occupation;
  if (s == "density_field") return ObservableSpec::Kind::density_field;
  if (s == "kv_block") return ObservableSpec::Kind::kv_block;
  rd.fail("kind", "unknown observable kind '" + s + "'");
}

QuadratureSettings read_quad(const Reader& rd, const json& j) {
  QuadratureSettings q;
  rd.allow(j, "quadrature", {"rel_tol", "abs_tol", "cutoff", "max_depth"});
  q.rel_tol = rd.get<double>(j, "rel_tol", q.rel_tol);
  q.abs_tol = rd.get<double>(j, "abs_tol", q.abs_tol);
  q.cutoff = rd.get<double>(j, "cutoff", q.cutoff);
  q.max_depth = rd.get<int>(j, "max_depth", q.max_depth);
  try {
    q.validate();
  } catch (const Error& e) {
    rd.fail("quadrature", e.what());
  }
  return q;
}

}  // namespace

Profile profile_from_params(const std::string& kind, const std::vector<std::pair<std::string, double>>& params) {
  json p = json::object();
  for (const auto& [k, v] : params) p[k] = v;
  json j = {{"kind", kind}, {"params", p}};
  std::string text = j.dump();
  Reader rd{text};
  return read_profile(rd, j);
}

ParsedConfig parse_config_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t pos = std::min(e.byte, text.size());
    long line = 1 + long(std::count(text.begin(), text.begin() + long(pos > 0 ? pos - 1 : 0), '\n'));
    throw Error(ErrorCode::config_error, "line " + std::to_string(line) + ": malformed JSON");
  }
  Reader rd{text};
  rd.allow(root, "config", {"profile", "n", "n_list", "T", "replicas", "seed", "margin_factor", "threads",
                            "max_events", "quadrature", "observables", "targets", "limit", "oracle"});
  ParsedConfig pc;
  pc.source = source;
  auto& cfg = pc.experiment;
  if (root.contains("profile")) cfg.profile = read_profile(rd, root.at("profile"));
  else if (!root.contains("limit") && !root.contains("oracle")) rd.fail("config", "missing key 'profile'");
  cfg.n = rd.get<long>(root, "n", cfg.n);
  cfg.n_list = rd.get<std::vector<long>>(root, "n_list", {});
  cfg.T = rd.get<double>(root, "T", cfg.T);
  cfg.replicas = rd.get<long>(root, "replicas", cfg.replicas);
  cfg.seed = rd.get<std::uint64_t>(root, "seed", cfg.seed);
  cfg.margin_factor = rd.get<double>(root, "margin_factor", cfg.margin_factor);
  cfg.threads = rd.get<unsigned>(root, "threads", cfg.threads);
  cfg.max_events = rd.get<double>(root, "max_events", cfg.max_events);
  if (root.contains("quadrature")) cfg.quad = read_quad(rd, root.at("quadrature"));
  if (cfg.n < 1) rd.fail("n", "'n' must be a positive integer");
  for (long m : cfg.n_list)
    if (m < 1) rd.fail("n_list", "'n_list' entries must be positive");
  if (cfg.replicas < 2) rd.fail("replicas", "'replicas' must be >= 2");
  if (!(cfg.T > 0)) rd.fail("T", "'T' must be positive");
  if (cfg.margin_factor < 1) rd.fail("margin_factor", "'margin_factor' must be >= 1");

  json obs_out = json::array();
  if (root.contains("observables")) {
    const json& arr = root.at("observables");
    if (!arr.is_array()) rd.fail("observables", "'observables' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const json& o = arr[i];
      std::string where = "observables[" + std::to_string(i) + "]";
      rd.allow(o, where, {"id", "kind", "site", "u", "times", "centred", "block_length", "test_function"});
      ObservableSpec s;
      s.kind = observable_kind(rd, rd.need<std::string>(o, "kind", where));
      s.output_times = rd.need<std::vector<double>>(o, "times", where);
      s.centred = rd.get<bool>(o, "centred", true);
      if (o.contains("site") && o.contains("u")) rd.fail("u", where + " gives both 'site' and 'u'");
      s.site = rd.get<long>(o, "site", 0);
      if (o.contains("u")) s.u = rd.get<double>(o, "u", 0.0);
      s.block_length = rd.get<long>(o, "block_length", 1);
      if (s.kind == ObservableSpec::Kind::density_field)
        s.H = read_test_function(rd, rd.need<json>(o, "test_function", where), where + ".test_function");
      std::string prefix = s.kind == ObservableSpec::Kind::current      ? "J"
                           : s.kind == ObservableSpec::Kind::occupation ? "G"
                           : s.kind == ObservableSpec::Kind::kv_block   ? "KV"
                                                                        : "Y";
      s.id = rd.get<std::string>(o, "id", prefix + std::to_string(i));
      try {
        s.validate();
      } catch (const Error& e) {
        rd.fail("observables", where + ": " + e.what());
      }
      json oj = {{"id", s.id}, {"kind", o.at("kind")}, {"times", s.output_times}, {"centred", s.centred}};
      if (s.u) oj["u"] = *s.u;
      else oj["site"] = s.site;
      if (s.kind == ObservableSpec::Kind::kv_block) oj["block_length"] = s.block_length;
      if (s.kind == ObservableSpec::Kind::density_field) oj["test_function"] = o.at("test_function");
      obs_out.push_back(oj);
      cfg.observables.push_back(s);
    }
  }
  auto find_obs = [&](const std::string& id) -> const ObservableSpec* {
    for (const auto& s : cfg.observables)
      if (s.id == id) return &s;
    return nullptr;
  };
  auto macro = [&](const ObservableSpec& s) { return s.u ? *s.u : double(s.site) / double(cfg.n); };

  json tgt_out = json::array();
  if (root.contains("targets")) {
    const json& arr = root.at("targets");
    if (!arr.is_array()) rd.fail("targets", "'targets' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const json& o = arr[i];
      std::string where = "targets[" + std::to_string(i) + "]";
      rd.allow(o, where, {"kind", "obs_i", "obs_j", "s", "t", "u1", "u2"});
      LimitTarget tg;
      tg.obs_i = rd.need<std::string>(o, "obs_i", where);
      tg.obs_j = rd.need<std::string>(o, "obs_j", where);
      const ObservableSpec* a = find_obs(tg.obs_i);
      const ObservableSpec* b = find_obs(tg.obs_j);
      if (!a) rd.fail("obs_i", where + ": unknown observable '" + tg.obs_i + "'");
      if (!b) rd.fail("obs_j", where + ": unknown observable '" + tg.obs_j + "'");
      tg.s = rd.need<double>(o, "s", where);
      tg.t = rd.need<double>(o, "t", where);
      using K = ObservableSpec::Kind;
      LimitKind lk;
      if (o.contains("kind")) {
        try {
          lk = limit_kind_from_string(rd.get<std::string>(o, "kind", ""));
        } catch (const Error& e) {
          rd.fail("kind", where + ": " + e.what());
        }
      } else if (a->kind == K::current && b->kind == K::current) lk = LimitKind::JJ;
      else if (a->kind == K::occupation && b->kind == K::occupation) lk = LimitKind::GG;
      else if (a->kind == K::occupation && b->kind == K::current) lk = LimitKind::GJ;
      else if (a->kind == K::density_field && b->kind == K::density_field) lk = LimitKind::YY;
      else rd.fail("targets", where + ": no limit formula for this observable pair (put the occupation first for GJ)");
      tg.request.kind = lk;
      tg.request.profile = cfg.profile;
      tg.request.quad = cfg.quad;
      tg.request.u1 = rd.get<double>(o, "u1", macro(*a));
      tg.request.u2 = rd.get<double>(o, "u2", macro(*b));
      tg.request.s = tg.s;
      tg.request.t = tg.t;
      if (lk == LimitKind::YY) {
        // E[Y_t(H) Y_s(G)] with t the later time
        bool swap = tg.s > tg.t;
        tg.request.H = swap ? a->H : b->H;
        tg.request.G = swap ? b->H : a->H;
        tg.request.s = std::min(tg.s, tg.t);
        tg.request.t = std::max(tg.s, tg.t);
      }
      tgt_out.push_back({{"kind", to_string(lk)}, {"obs_i", tg.obs_i}, {"obs_j", tg.obs_j}, {"s", tg.s}, {"t", tg.t},
                         {"u1", tg.request.u1}, {"u2", tg.request.u2}});
      cfg.targets.push_back(tg);
    }
  }

  json out = {{"n", cfg.n},
              {"T", cfg.T},
              {"replicas", cfg.replicas},
              {"seed", cfg.seed},
              {"margin_factor", cfg.margin_factor},
              {"max_events", cfg.max_events},
              {"quadrature",
               {{"rel_tol", cfg.quad.rel_tol}, {"abs_tol", cfg.quad.abs_tol}, {"cutoff", cfg.quad.cutoff},
                {"max_depth", cfg.quad.max_depth}}},
              {"observables", obs_out},
              {"targets", tgt_out}};
  if (root.contains("profile")) out["profile"] = root.at("profile");
  if (!cfg.n_list.empty()) out["n_list"] = cfg.n_list;

  if (root.contains("limit")) {
    const json& o = root.at("limit");
    rd.allow(o, "limit", {"kind", "u1", "u2", "s", "t", "H", "G"});
    LimitRequest lr;
    try {
      lr.kind = limit_kind_from_string(rd.need<std::string>(o, "kind", "limit"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::config_error) throw;
      rd.fail("kind", std::string("limit: ") + e.what());
    }
    lr.profile = cfg.profile;
    lr.quad = cfg.quad;
    lr.u1 = rd.get<double>(o, "u1", 0.0);
    lr.u2 = rd.get<double>(o, "u2", 0.0);
    lr.s = rd.need<double>(o, "s", "limit");
    lr.t = rd.need<double>(o, "t", "limit");
    if (o.contains("H")) lr.H = read_test_function(rd, o.at("H"), "limit.H");
    if (o.contains("G")) lr.G = read_test_function(rd, o.at("G"), "limit.G");
    out["limit"] = o;
    pc.limit = lr;
  }
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    rd.allow(o, "oracle", {"kind", "k", "sites", "n", "times", "start", "replicas", "seed", "M"});
    OracleRequest r;
    r.kind = rd.need<std::string>(o, "kind", "oracle");
    static const std::set<std::string> kinds{"grad", "meeting", "coupling", "correlation", "lex"};
    if (!kinds.count(r.kind)) rd.fail("kind", "unknown oracle kind '" + r.kind + "'");
    r.k = rd.get<int>(o, "k", r.k);
    r.sites = rd.get<int>(o, "sites", r.sites);
    r.n = rd.get<long>(o, "n", r.n);
    r.times = rd.get<std::vector<double>>(o, "times", {});
    r.start = rd.get<std::vector<long>>(o, "start", {});
    r.replicas = rd.get<long>(o, "replicas", r.replicas);
    r.seed = rd.get<std::uint64_t>(o, "seed", r.seed);
    r.M = rd.get<long>(o, "M", 0);
    out["oracle"] = o;
    pc.oracle = r;
  }
  pc.resolved = out.dump(2);
  return pc;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace ssep
