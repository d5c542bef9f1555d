#pragma once

namespace emakit {

inline constexpr const char* kEmakitVersion = "0.1.0";

}  // namespace emakit
