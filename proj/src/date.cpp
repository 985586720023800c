// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/date.hpp"

#include <array>
#include <cstdio>

namespace pubfab {

namespace {

bool is_leap(int32_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int32_t days_in_month(int32_t y, int32_t m) {
    static constexpr std::array<int32_t, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                      31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

}  // namespace

bool Date::valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

// Civil-from-days and days-from-civil after Howard Hinnant's public-domain
// calendar algorithms.
int64_t Date::epoch_days() const {
    int64_t y = year;
    y -= month <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const int64_t yoe = y - era * 400;
    const int64_t doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

Date Date::from_epoch_days(int64_t z) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const int64_t doe = z - era * 146097;
    const int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = yoe + era * 400;
    const int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int64_t mp = (5 * doy + 2) / 153;
    const int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const int64_t m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int32_t>(y + (m <= 2)), static_cast<int32_t>(m),
                static_cast<int32_t>(d)};
}

Date Date::plus_days(int64_t days) const {
    return from_epoch_days(epoch_days() + days);
}

std::optional<Date> Date::parse(std::string_view text) {
    // Fixed "YYYY-MM-DD" layout, four-digit year.
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto digits = [&](size_t pos, size_t n) -> std::optional<int32_t> {
        int32_t v = 0;
        for (size_t i = 0; i < n; ++i) {
            char c = text[pos + i];
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        return v;
    };
    auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
    if (!y || !m || !d) return std::nullopt;
    Date date{*y, *m, *d};
    if (!date.valid()) return std::nullopt;
    return date;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

}  // namespace pubfab
