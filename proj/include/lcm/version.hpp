#ifndef LCM_VERSION_HPP
#define LCM_VERSION_HPP

namespace lcm {

inline constexpr const char* kToolName = "lcmident";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace lcm

#endif
