#pragma once

#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/error.hpp"

namespace nd::text {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

/// Whitespace- or comma-separated list of numbers.
inline std::vector<double> parse_double_list(std::string_view s, std::string_view what) {
    std::vector<double> out;
    std::string buf(s);
    for (auto& c : buf)
        if (c == ',') c = ' ';
    std::size_t i = 0;
    while (i < buf.size()) {
        while (i < buf.size() && buf[i] == ' ') ++i;
        if (i >= buf.size()) break;
        std::size_t j = i;
        while (j < buf.size() && buf[j] != ' ') ++j;
        double v = 0.0;
        if (!parse_double(std::string_view(buf).substr(i, j - i), v))
            throw Error(ErrorCode::Parse, std::string(what) + ": bad number '" + buf.substr(i, j - i) + "'");
        out.push_back(v);
        i = j;
    }
    return out;
}

template <typename T>
std::string join(std::span<const T> values, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(static_cast<double>(values[i]));
        else
            out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace nd::text
