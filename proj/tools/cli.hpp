#pragma once

#include <string>
#include <vector>

namespace ssep::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 failed comparison, 2 configuration error,
// 3 resource or quadrature failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace ssep::cli
