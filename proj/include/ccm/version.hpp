#pragma once

namespace ccm {
inline constexpr const char* kVersion = "0.1.0";
}
