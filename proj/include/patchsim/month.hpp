#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace patchsim {

/// Month index counted from the configured epoch. Index 0 is the epoch month.
struct Month {
    int index = 0;

    friend constexpr auto operator<=>(Month, Month) = default;
};

/// Calendar anchor of the month axis plus the last month of the observation
/// window (inclusive).
struct Horizon {
    int epoch_year = 2008;
    int epoch_month = 1;
    int end_index = 144;  // 2020-01

    int columns() const noexcept { return end_index + 1; }
    bool contains(Month m) const noexcept { return m.index >= 0 && m.index <= end_index; }

    friend bool operator==(const Horizon&, const Horizon&) = default;
};

/// A calendar date reduced to a month offset from the epoch. `offset` may be
/// negative or past the horizon; `truncated` is set when a day component was
/// dropped.
struct CalendarMonth {
    int offset = 0;
    bool truncated = false;
};

/// Parses "YYYY-MM" (or "YYYY-MM-DD" when `allow_day` is set) without any
/// range check against the horizon. Throws DataError{Malformed}.
CalendarMonth parse_calendar_month(std::string_view text, const Horizon& horizon,
                                   bool allow_day = true);

/// Strict "YYYY-MM" parse into the observation window. Distinct DataError
/// kinds for malformed text, dates before the epoch and dates past the horizon.
Month parse_month(std::string_view text, const Horizon& horizon);

/// Formats a month offset (possibly negative) as "YYYY-MM".
std::string format_month(int offset, const Horizon& horizon);
inline std::string format_month(Month m, const Horizon& horizon) {
    return format_month(m.index, horizon);
}

/// Builds a horizon from "YYYY-MM" epoch and end strings.
Horizon make_horizon(std::string_view epoch, std::string_view end);

}  // namespace patchsim
