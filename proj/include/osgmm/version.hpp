#pragma once

#include <string_view>

namespace osgmm {

inline constexpr std::string_view kToolName = "osgmm";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace osgmm
