#pragma once

namespace stvf {

inline constexpr const char* kVersion = "0.1.0";

} // namespace stvf
