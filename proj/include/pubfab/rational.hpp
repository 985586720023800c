// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <string_view>

namespace pubfab {

// Exact arithmetic for grades, thresholds and ranking scores. Scores must be
// order-independent and reproducible, which rules out floating point.
using Rational = boost::multiprecision::cpp_rational;

// Canonical text form "numerator/denominator" in lowest terms, denominator
// positive ("11/15", "-1/2", "3/1").
inline std::string rational_to_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

inline std::optional<Rational> rational_parse(std::string_view text) {
    auto parse_int = [](std::string_view s) -> std::optional<boost::multiprecision::cpp_int> {
        if (s.empty()) return std::nullopt;
        size_t start = s[0] == '-' ? 1 : 0;
        if (start == s.size()) return std::nullopt;
        for (size_t i = start; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
        }
        return boost::multiprecision::cpp_int(std::string(s));
    };
    size_t slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto n = parse_int(text);
        if (!n) return std::nullopt;
        return Rational(*n);
    }
    auto num = parse_int(text.substr(0, slash));
    auto den = parse_int(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return Rational(*num, *den);
}

}  // namespace pubfab
