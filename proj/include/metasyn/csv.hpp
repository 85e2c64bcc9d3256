#pragma once

#include <charconv>
#include <string>

namespace metasyn {

// Shortest round-trip decimal form; locale independent.
inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace metasyn
