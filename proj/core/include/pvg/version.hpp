#pragma once

namespace pvg {
inline constexpr const char* kVersion = "0.1.0";
}
