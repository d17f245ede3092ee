#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssep/limit_gaussian.hpp"
#include "ssep/mc_lab.hpp"

namespace ssep {

// Exact-oracle scan request: grad | meeting | coupling | correlation | lex.
struct OracleRequest {
  std::string kind = "grad";
  int k = 1;
  int sites = 16;
  long n = 4;
  std::vector<double> times;
  std::vector<long> start;  // particle positions for coupling / lex
  long replicas = 10000;
  std::uint64_t seed = 1;
  long M = 0;  // meeting walk cutoff, 0 = automatic
};

struct ParsedConfig {
  std::string source;  // path or "<string>"
  ExperimentConfig experiment;
  std::optional<LimitRequest> limit;
  std::optional<OracleRequest> oracle;
  std::string resolved;  // defaulted configuration as pretty JSON
};

// Throws Error(config_error) with "line L: ..." messages on schema violations.
ParsedConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ParsedConfig parse_config(const std::string& path);

Profile profile_from_params(const std::string& kind, const std::vector<std::pair<std::string, double>>& params);

}  // namespace ssep
