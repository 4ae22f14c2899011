#pragma once

namespace cbamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cbamp
