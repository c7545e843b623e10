#pragma once

namespace rosarch {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rosarch
