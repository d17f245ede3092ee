#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(SSEP_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("ssep_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

const char* kSmall = R"({
  "profile": {"kind": "tanh", "params": {"a": 0.3, "b": 0.7, "center": 0, "width": 0.5}},
  "n": 10, "T": 0.5, "replicas": 200, "seed": 17, "threads": 1,
  "observables": [
    {"kind": "current", "id": "J", "site": 0, "times": [0.25, 0.5]},
    {"kind": "occupation", "id": "G", "site": 0, "times": [0.5]}
  ]
})";

}  // namespace

TEST_CASE("limit at equilibrium: occupation-current cancels") {
  auto r = run("limit --kind gj --equilibrium 0.5 --s 1 --t 1");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("value").get<double>()) < 1e-6);
  r = run("limit --kind jj --equilibrium 0.5 --s 1 --t 1");
  REQUIRE(r.code == 0);
  // chi / sqrt(pi) * 2
  CHECK(nlohmann::json::parse(r.out).at("value").get<double>() == doctest::Approx(0.5 / std::sqrt(M_PI)).epsilon(1e-6));
}

TEST_CASE("exit codes") {
  CHECK(run("--version").code == 0);
  CHECK(run("limit --kind qq --equilibrium 0.5").code == 2);
  CHECK(run("limit --kind jj --equilibrium 1.5").code == 2);
  CHECK(run("simulate --bogus").code == 2);
  CHECK(run("oracle grad --k 2 --sites 16 --times 0.01 0.1").code == 0);
  CHECK(run("oracle grad --k 2 --sites 40").code == 3);

  auto d = scratch("codes");
  std::string cap = kSmall;
  cap.insert(cap.rfind('}'), ", \"max_events\": 10\n");
  put(d / "cap.json", cap);
  CHECK(run("simulate --config " + (d / "cap.json").string()).code == 3);

  put(d / "unknown.json", "{\n \"profile\": {\"kind\": \"constant\", \"params\": {\"rho\": 0.5}},\n \"rho_zero\": 1\n}");
  CHECK(run("simulate --config " + (d / "unknown.json").string()).code == 2);

  // a current compared against the occupation-time formula is off by a third
  std::string bad = R"({
    "profile": {"kind": "constant", "params": {"rho": 0.5}},
    "n": 10, "T": 1, "replicas": 3000, "seed": 3, "threads": 1,
    "observables": [{"kind": "current", "id": "J", "times": [1]}],
    "targets": [{"kind": "gg", "obs_i": "J", "obs_j": "J", "s": 1, "t": 1}]})";
  put(d / "bad.json", bad);
  auto r = run("compare --config " + (d / "bad.json").string());
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
  std::string good = bad;
  good.replace(good.find("\"gg\""), 4, "\"jj\"");
  put(d / "good.json", good);
  CHECK(run("compare --config " + (d / "good.json").string()).code == 0);
}

TEST_CASE("simulate writes outputs and a manifest that reruns bit-identically") {
  auto d = scratch("manifest");
  put(d / "cfg.json", kSmall);
  auto a = d / "a", b = d / "b";
  REQUIRE(run("simulate --config " + (d / "cfg.json").string() + " --out " + a.string()).code == 0);
  REQUIRE(fs::exists(a / "manifest.json"));
  auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m.at("seed").get<std::uint64_t>() == 17);
  REQUIRE(run("--manifest " + (a / "manifest.json").string() + " --out " + b.string()).code == 0);
  int compared = 0;
  for (const auto& name : m.at("outputs")) {
    auto f = name.get<std::string>();
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    ++compared;
  }
  CHECK(compared > 0);
  // a different seed changes the trajectories
  auto c = d / "c";
  REQUIRE(run("simulate --config " + (d / "cfg.json").string() + " --seed 18 --out " + c.string()).code == 0);
  CHECK(slurp(a / m.at("outputs")[0].get<std::string>()) != slurp(c / m.at("outputs")[0].get<std::string>()));
}

TEST_CASE("oracle meeting matches its closed form") {
  auto r = run("oracle meeting --n 4 --times 0.01 0.1");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("rows").size() == 2);
  // e^{-l}(I_0(l) + I_1(l)) at l = 4 n^2 t = 0.64
  CHECK(j.at("rows")[0].at("tail").get<double>() == doctest::Approx(std::exp(-0.64) * (std::cyl_bessel_i(0.0, 0.64) + std::cyl_bessel_i(1.0, 0.64))).epsilon(1e-6));
}
