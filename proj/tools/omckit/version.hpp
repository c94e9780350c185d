#pragma once

namespace omckit::cli {
inline constexpr const char* kVersion = "0.1.0";
}
