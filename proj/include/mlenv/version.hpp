#pragma once

namespace mlenv {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mlenv
