#pragma once

namespace nonharm {

inline constexpr const char* kVersion = "nonharm 0.1.0";

}
