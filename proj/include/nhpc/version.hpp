#pragma once

namespace nhpc {
inline constexpr const char* version = "0.1.0";
}
