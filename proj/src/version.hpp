#pragma once

namespace aml {

inline constexpr const char *kVersion = "0.1.0";

}  // namespace aml
