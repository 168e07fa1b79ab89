#pragma once

namespace pdmp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pdmp
