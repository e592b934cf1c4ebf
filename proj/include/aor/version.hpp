#pragma once

namespace aor {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aor
