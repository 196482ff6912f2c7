#include "patchsim/month.hpp"

#include "patchsim/errors.hpp"

#include <charconv>
#include <cstdio>

namespace patchsim {

namespace {

bool parse_digits(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && ptr == text.data() + pos + len;
}

[[noreturn]] void malformed(std::string_view text) {
    throw DataError(DataError::Kind::Malformed,
                    "malformed month '" + std::string(text) + "' (expected YYYY-MM)");
}

}  // namespace

CalendarMonth parse_calendar_month(std::string_view text, const Horizon& horizon,
                                   bool allow_day) {
    int year = 0;
    int month = 0;
    if (text.size() < 7 || text[4] != '-' || !parse_digits(text, 0, 4, year) ||
        !parse_digits(text, 5, 2, month) || month < 1 || month > 12) {
        malformed(text);
    }
    bool truncated = false;
    if (text.size() != 7) {
        int day = 0;
        if (!allow_day || text.size() != 10 || text[7] != '-' ||
            !parse_digits(text, 8, 2, day) || day < 1 || day > 31) {
            malformed(text);
        }
        truncated = true;
    }
    return {12 * (year - horizon.epoch_year) + (month - horizon.epoch_month), truncated};
}

Month parse_month(std::string_view text, const Horizon& horizon) {
    const auto cal = parse_calendar_month(text, horizon, false);
    if (cal.offset < 0) {
        throw DataError(DataError::Kind::BeforeEpoch,
                        "month '" + std::string(text) + "' precedes the epoch " +
                            format_month(0, horizon));
    }
    if (cal.offset > horizon.end_index) {
        throw DataError(DataError::Kind::AfterHorizon,
                        "month '" + std::string(text) + "' is past the horizon " +
                            format_month(horizon.end_index, horizon));
    }
    return Month{cal.offset};
}

std::string format_month(int offset, const Horizon& horizon) {
    const int absolute = horizon.epoch_year * 12 + (horizon.epoch_month - 1) + offset;
    // floor division so pre-epoch offsets land in the right year
    int year = absolute / 12;
    int month0 = absolute % 12;
    if (month0 < 0) {
        month0 += 12;
        --year;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month0 + 1);
    return buf;
}

Horizon make_horizon(std::string_view epoch, std::string_view end) {
    Horizon h;
    const Horizon probe{0, 1, 0};
    const auto e = parse_calendar_month(epoch, probe, false);
    h.epoch_year = e.offset / 12;
    h.epoch_month = e.offset % 12 + 1;
    const auto last = parse_calendar_month(end, h, false);
    if (last.offset <= 0) {
        throw DataError(DataError::Kind::Configuration,
                        "horizon " + std::string(end) + " must come after epoch " +
                            std::string(epoch));
    }
    h.end_index = last.offset;
    return h;
}

}  // namespace patchsim
