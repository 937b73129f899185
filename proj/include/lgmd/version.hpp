#pragma once

namespace lgmd {

inline constexpr const char* kToolName = "lgmd";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace lgmd
