#pragma once

namespace degpar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace degpar
