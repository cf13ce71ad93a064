#pragma once

namespace classfair {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace classfair
