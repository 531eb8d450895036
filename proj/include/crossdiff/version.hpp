#pragma once

namespace crossdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace crossdiff
