#pragma once

namespace bethe {

inline constexpr const char* kToolName = "bethe-lab";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace bethe
