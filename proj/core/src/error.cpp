#include "ssep/error.hpp"

namespace ssep {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_profile: return "invalid-profile";
    case ErrorCode::window_too_small: return "window-too-small";
    case ErrorCode::invalid_time: return "invalid-time";
    case ErrorCode::quadrature_failure: return "quadrature-failure";
    case ErrorCode::insufficient_observables: return "insufficient-observables";
    case ErrorCode::system_too_large: return "system-too-large";
    case ErrorCode::boundary_mass_too_large: return "boundary-mass-too-large";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::resource_cap: return "resource-cap";
  }
  return "unknown";
}

}  // namespace ssep
