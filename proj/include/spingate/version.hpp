#pragma once

namespace spingate {

inline constexpr const char* kVersion = "1.0.0";

} // namespace spingate
