#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace ipsketch {

enum class Method : std::uint8_t { mh = 1, wmh = 2, kmv = 3, jl = 4, cs = 5 };

/// How weighted MinHash hashes the expanded vector. `none` for other methods.
enum class Strategy : std::uint8_t { none = 0, exact = 1, fast = 2 };

inline std::string_view method_name(Method m) {
    switch (m) {
    case Method::mh: return "MH";
    case Method::wmh: return "WMH";
    case Method::kmv: return "KMV";
    case Method::jl: return "JL";
    case Method::cs: return "CS";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    std::string up(s);
    for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (Method m : {Method::mh, Method::wmh, Method::kmv, Method::jl, Method::cs})
        if (method_name(m) == up) return m;
    detail::fail("unknown method '" + std::string(s) + "'");
}

inline std::string_view strategy_name(Strategy s) {
    switch (s) {
    case Strategy::none: return "none";
    case Strategy::exact: return "exact";
    case Strategy::fast: return "fast";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view s) {
    for (Strategy st : {Strategy::none, Strategy::exact, Strategy::fast})
        if (strategy_name(st) == s) return st;
    detail::fail("unknown strategy '" + std::string(s) + "'");
}

namespace detail {

/// Median of an odd-length sample.
inline double median_odd(std::vector<double> xs) {
    require(!xs.empty(), "median of an empty list");
    require(xs.size() % 2 == 1, "median boosting needs an odd number of sketch pairs");
    const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    return *mid;
}

/// Plain median (mean of the middle two for even sizes).
inline double median(std::vector<double> xs) {
    require(!xs.empty(), "median of an empty list");
    std::sort(xs.begin(), xs.end());
    const std::size_t h = xs.size() / 2;
    return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

} // namespace detail
} // namespace ipsketch
