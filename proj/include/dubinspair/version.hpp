#pragma once

namespace dubinspair {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dubinspair
