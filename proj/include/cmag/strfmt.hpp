#pragma once

#include <cstdio>
#include <string>

namespace cmag {

/// printf-style formatting into a std::string.
template <typename... Args>
std::string strfmt(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    if (n <= 0)
        return {};
    std::string s(static_cast<std::size_t>(n), '\0');
    std::snprintf(s.data(), static_cast<std::size_t>(n) + 1, fmt, args...);
    return s;
}

} // namespace cmag
