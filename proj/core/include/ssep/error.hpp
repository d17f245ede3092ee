#pragma once

#include <stdexcept>
#include <string>

namespace ssep {

enum class ErrorCode {
  invalid_profile,
  window_too_small,
  invalid_time,
  quadrature_failure,
  insufficient_observables,
  system_too_large,
  boundary_mass_too_large,
  invalid_input,
  config_error,
  resource_cap,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Quadrature failure keeps the best estimate around for callers that want it.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double bound)
      : Error(ErrorCode::quadrature_failure, what), estimate_(estimate), bound_(bound) {}
  double estimate() const { return estimate_; }
  double bound() const { return bound_; }

 private:
  double estimate_;
  double bound_;
};

}  // namespace ssep
