#pragma once

namespace nlfb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlfb
