#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "fmatsp/error.hpp"

namespace fmatsp {

/// Shortest round-trip decimal form; locale independent.
inline std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

/// Fixed notation with `digits` after the decimal point.
inline std::string format_fixed(double value, int digits) {
    char buf[128];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
    return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ValidationError("cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace fmatsp
