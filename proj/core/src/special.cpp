#include "ssep/special.hpp"

#include <string>

#include "ssep/error.hpp"

namespace ssep {

double heat_kernel(double t, double u, double v) {
  if (!(t > 0)) throw Error(ErrorCode::invalid_time, "heat kernel needs t > 0, got " + std::to_string(t));
  double d = u - v;
  return std::exp(-d * d / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

}  // namespace ssep
