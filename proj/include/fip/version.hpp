#pragma once

namespace fip {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fip
