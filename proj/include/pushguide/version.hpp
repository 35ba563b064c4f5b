#pragma once

namespace pushguide {
inline constexpr const char* version = "0.1.0";
}
