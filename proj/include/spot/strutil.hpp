#pragma once

#include <cctype>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace spot {

inline std::string strfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(static_cast<std::size_t>(n), '\0');
    std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

/// Round-half-up to tenths; exact integer arithmetic below keeps rendering stable.
inline long long to_tenths(double v) {
    return static_cast<long long>(std::floor(v * 10.0 + 0.5));
}

/// Render a tenths count as "d.d" (e.g. 543 -> "54.3", -200 -> "-20.0").
inline std::string tenths_to_string(long long tenths) {
    long long a = tenths < 0 ? -tenths : tenths;
    std::string s = (tenths < 0 ? "-" : "") + std::to_string(a / 10) + "." + std::to_string(a % 10);
    return s;
}

inline std::string format_1dp(double v) { return tenths_to_string(to_tenths(v)); }

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

/// Whitespace-separated words of the lowercased input.
inline std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

template <typename It, typename Fn>
std::string join_map(It begin, It end, const std::string& sep, Fn fn) {
    std::string out;
    for (It it = begin; it != end; ++it) {
        if (!out.empty()) out += sep;
        out += fn(*it);
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    return join_map(parts.begin(), parts.end(), sep, [](const std::string& s) { return s; });
}

// 64-bit mixing and hashing primitives used by signatures and embeddings.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace spot
