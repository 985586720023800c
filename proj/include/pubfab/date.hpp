// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pubfab {

// Proleptic Gregorian calendar date. All process timing in the fabric is
// expressed as logical calendar dates injected by callers; nothing in the
// core reads the system clock.
struct Date {
    int32_t year = 1970;
    int32_t month = 1;  // 1..12
    int32_t day = 1;    // 1..31, must exist in the month

    static std::optional<Date> parse(std::string_view text);  // "YYYY-MM-DD"
    static Date from_epoch_days(int64_t days);                // days since 1970-01-01

    std::string to_string() const;
    int64_t epoch_days() const;
    Date plus_days(int64_t days) const;
    bool valid() const;

    friend auto operator<=>(const Date& a, const Date& b) {
        return a.epoch_days() <=> b.epoch_days();
    }
    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
};

}  // namespace pubfab
