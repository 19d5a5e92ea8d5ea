#pragma once

namespace sbmsdp {
inline constexpr const char* kVersion = "0.1.0";
}
