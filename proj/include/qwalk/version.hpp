#pragma once

namespace qwalk {

inline constexpr const char* kVersion = "1.0.0";

}
