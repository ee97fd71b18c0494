#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <type_traits>

namespace alcrp {

/// Shortest round-trip decimal form; deterministic, locale-independent.
/// All CSV/JSON output goes through this so replays are byte-identical.
inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template <typename T>
    requires std::is_integral_v<T>
inline std::string fmt(T v) {
    return std::to_string(v);
}

}  // namespace alcrp
