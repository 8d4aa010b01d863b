#pragma once

namespace czkit {

inline constexpr const char* version_string = "czkit 0.1.0";

} // namespace czkit
