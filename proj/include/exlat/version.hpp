#pragma once

namespace exlat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace exlat
