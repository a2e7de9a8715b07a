#pragma once

namespace qdf {

inline constexpr const char* version = "0.1.0";

} // namespace qdf
