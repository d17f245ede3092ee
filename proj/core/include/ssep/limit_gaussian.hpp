#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ssep/mean_field.hpp"
#include "ssep/profile.hpp"
#include "ssep/quadrature.hpp"
#include "ssep/test_function.hpp"

namespace ssep {

enum class LimitKind { JJ, GG, GJ, JL, YY };

std::string to_string(LimitKind k);
LimitKind limit_kind_from_string(const std::string& s);

// Locations and times of the two observables. For GJ the first pair (u1, s)
// belongs to the occupation time and (u2, t) to the current.
struct LimitRequest {
  LimitKind kind = LimitKind::JJ;
  Profile profile = Profile::constant(0.5);
  double u1 = 0, u2 = 0, s = 0, t = 0;
  TestFunction H, G;  // YY only: E[Y_t(H) Y_s(G)]
  QuadratureSettings quad;
};

struct LimitValue {
  double value = 0;
  double error_estimate = 0;
  std::vector<std::pair<std::string, double>> term_breakdown;
  // YY only: the two equivalent forms and their difference
  double form0 = 0, form1 = 0, form_difference = 0;

  double term(const std::string& name) const;
};

// The continuum side only uses profile and quadrature of the field.
LimitValue cov_current_current(const HeatField& f, double u1, double s, double u2, double t);
LimitValue cov_occupation_occupation(const HeatField& f, double u1, double s, double u2, double t);
// occupation time at (u1, s) against the current at (u2, t)
LimitValue cov_occupation_current(const HeatField& f, double u1, double s, double u2, double t);
LimitValue cov_current_jaralandim(const HeatField& f, double u, double s, double t);
// E[Y_t(H) Y_s(G)] for s <= t
LimitValue cov_density_field(const HeatField& f, const TestFunction& H, const TestFunction& G, double s, double t);

LimitValue evaluate(const LimitRequest& req);

}  // namespace ssep
