#ifndef HDGCD_VERSION_HPP
#define HDGCD_VERSION_HPP

namespace hdgcd {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
