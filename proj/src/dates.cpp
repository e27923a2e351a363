#include "chronoweave/dates.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <optional>

#include "chronoweave/errors.hpp"
#include "chronoweave/text.hpp"

namespace chronoweave {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                                      "jul", "aug", "sep", "oct", "nov", "dec"};

// Obsolete zone names admitted by RFC 2822 §4.3.
struct NamedZone {
    std::string_view name;
    int offset_minutes;
};
constexpr std::array<NamedZone, 11> kNamedZones = {{{"GMT", 0},
                                                    {"UT", 0},
                                                    {"UTC", 0},
                                                    {"EST", -5 * 60},
                                                    {"EDT", -4 * 60},
                                                    {"CST", -6 * 60},
                                                    {"CDT", -5 * 60},
                                                    {"MST", -7 * 60},
                                                    {"MDT", -6 * 60},
                                                    {"PST", -8 * 60},
                                                    {"PDT", -7 * 60}}};

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(int y, unsigned m) {
    static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void skip_spaces() {
        while (!done() && s_[pos_] == ' ') ++pos_;
    }
    // Reads exactly `digits` decimal digits.
    std::optional<int> fixed_int(int digits) {
        if (pos_ + digits > s_.size()) return std::nullopt;
        int v = 0;
        for (int i = 0; i < digits; ++i) {
            char c = s_[pos_ + i];
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        pos_ += static_cast<std::size_t>(digits);
        return v;
    }
    // Reads 1..max_digits digits.
    std::optional<int> var_int(int max_digits) {
        int v = 0;
        int n = 0;
        while (n < max_digits && !done() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            ++pos_;
            ++n;
        }
        if (n == 0) return std::nullopt;
        return v;
    }
    std::string_view word() {
        std::size_t start = pos_;
        while (!done() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return s_.substr(start, pos_ - start);
    }
    std::size_t pos() const { return pos_; }
    std::string_view rest() const { return s_.substr(pos_); }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

std::optional<UtcSeconds> combine(int y, int mo, int d, int h, int mi, int se, int offset_minutes) {
    if (!valid_ymd(y, static_cast<unsigned>(mo), static_cast<unsigned>(d))) return std::nullopt;
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 60) return std::nullopt;
    if (se == 60) se = 59;  // fold leap seconds
    std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    std::int64_t secs = days * 86400 + h * 3600 + mi * 60 + se;
    return secs - static_cast<std::int64_t>(offset_minutes) * 60;
}

std::optional<int> parse_offset(Cursor& c, bool allow_colon) {
    char sign = c.peek();
    if (sign != '+' && sign != '-') return std::nullopt;
    c.accept(sign);
    auto hh = c.fixed_int(2);
    if (!hh) return std::nullopt;
    if (allow_colon) c.accept(':');
    auto mm = c.fixed_int(2);
    if (!mm) return std::nullopt;
    if (*hh > 23 || *mm > 59) return std::nullopt;
    int total = *hh * 60 + *mm;
    return sign == '-' ? -total : total;
}

std::optional<UtcSeconds> parse_iso(std::string_view s) {
    Cursor c(s);
    auto y = c.fixed_int(4);
    if (!y || !c.accept('-')) return std::nullopt;
    auto mo = c.fixed_int(2);
    if (!mo || !c.accept('-')) return std::nullopt;
    auto d = c.fixed_int(2);
    if (!d) return std::nullopt;

    if (c.done()) return combine(*y, *mo, *d, 0, 0, 0, 0);  // bare date, midnight UTC

    if (!c.accept('T') && !c.accept('t')) return std::nullopt;
    auto h = c.fixed_int(2);
    if (!h || !c.accept(':')) return std::nullopt;
    auto mi = c.fixed_int(2);
    if (!mi || !c.accept(':')) return std::nullopt;
    auto se = c.fixed_int(2);
    if (!se) return std::nullopt;
    if (c.accept('.')) {
        // Fractional seconds are accepted and truncated.
        if (!c.var_int(9)) return std::nullopt;
    }
    int offset = 0;
    if (c.accept('Z') || c.accept('z')) {
        offset = 0;
    } else {
        auto off = parse_offset(c, true);
        if (!off) return std::nullopt;  // offset is mandatory for date-times
        offset = *off;
    }
    if (!c.done()) return std::nullopt;
    return combine(*y, *mo, *d, *h, *mi, *se, offset);
}

std::optional<UtcSeconds> parse_rfc2822(std::string_view raw) {
    std::string s = collapse_whitespace(raw);
    Cursor c(s);

    // Optional day-of-week ("Thu, ").
    std::size_t mark = c.pos();
    std::string_view w = c.word();
    if (w.size() == 3 && c.accept(',')) {
        c.skip_spaces();
    } else if (!w.empty()) {
        c = Cursor(s);  // month name cannot appear first; rewind
        (void)mark;
    }

    auto day = c.var_int(2);
    if (!day) return std::nullopt;
    c.skip_spaces();
    std::string mon = to_lower_ascii(c.word());
    int month = 0;
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
        if (mon == kMonths[i]) month = static_cast<int>(i) + 1;
    }
    if (month == 0) return std::nullopt;
    c.skip_spaces();
    auto year = c.var_int(4);
    if (!year) return std::nullopt;
    if (*year < 100) *year += *year < 50 ? 2000 : 1900;  // two-digit years per RFC 2822 §4.3
    c.skip_spaces();
    auto h = c.fixed_int(2);
    if (!h || !c.accept(':')) return std::nullopt;
    auto mi = c.fixed_int(2);
    if (!mi) return std::nullopt;
    int se = 0;
    if (c.accept(':')) {
        auto sec = c.fixed_int(2);
        if (!sec) return std::nullopt;
        se = *sec;
    }
    c.skip_spaces();
    int offset = 0;
    if (auto off = parse_offset(c, false)) {
        offset = *off;
    } else {
        std::string_view zone = c.rest();
        bool found = false;
        for (const auto& nz : kNamedZones) {
            if (zone == nz.name) {
                offset = nz.offset_minutes;
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
        return combine(*year, month, *day, *h, *mi, se, offset);
    }
    if (!c.done()) return std::nullopt;
    return combine(*year, month, *day, *h, *mi, se, offset);
}

}  // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    // Howard Hinnant's chrono-compatible civil calendar algorithm.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

bool valid_ymd(int year, unsigned month, unsigned day) {
    if (month < 1 || month > 12) return false;
    if (day < 1 || day > days_in_month(year, month)) return false;
    return true;
}

UtcSeconds parse_date_time(std::string_view s) {
    std::string trimmed = trim(s);
    if (auto t = parse_iso(trimmed)) return *t;
    if (auto t = parse_rfc2822(trimmed)) return *t;
    throw DateError("unparseable date: \"" + trimmed + "\"");
}

std::string format_iso_date(UtcSeconds t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) --days;
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

std::string format_iso_date_time(UtcSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d, static_cast<int>(rem / 3600),
                  static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
    return buf;
}

}  // namespace chronoweave
