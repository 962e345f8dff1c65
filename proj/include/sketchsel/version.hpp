#pragma once

namespace sketchsel {

inline constexpr const char* kToolName = "sketchsel";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sketchsel
