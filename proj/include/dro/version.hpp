#pragma once

namespace dro {

inline constexpr const char* kVersion = "0.1.0";

}
