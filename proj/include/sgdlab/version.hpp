#pragma once

namespace sgdlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sgdlab
