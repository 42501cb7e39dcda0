#pragma once

namespace cohmeter {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cohmeter
