#pragma once

namespace sphcusum {

inline constexpr const char *kVersion = "1.0.0";

} // namespace sphcusum
