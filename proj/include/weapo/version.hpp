#pragma once

namespace weapo {
inline constexpr const char* kVersion = "0.1.0";
}
