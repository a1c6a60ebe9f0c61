#pragma once

namespace lambdagent {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lambdagent
