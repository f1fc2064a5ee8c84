#pragma once

namespace mmt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mmt
