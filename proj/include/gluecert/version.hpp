#pragma once

namespace gluecert {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gluecert
