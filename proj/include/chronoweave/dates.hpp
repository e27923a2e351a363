#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chronoweave {

// Seconds since the Unix epoch, always UTC.
using UtcSeconds = std::int64_t;

// Parses exactly three formats: ISO-8601 date-time with offset
// ("2023-06-01T09:30:00Z", "2023-06-01T09:30:00+02:00"), ISO-8601 date
// ("2023-06-01", midnight UTC), and RFC-2822 ("Thu, 01 Jun 2023 09:30:00 +0200").
// Anything else throws DateError echoing the offending string.
UtcSeconds parse_date_time(std::string_view s);

std::string format_iso_date(UtcSeconds t);       // YYYY-MM-DD
std::string format_iso_date_time(UtcSeconds t);  // YYYY-MM-DDTHH:MM:SSZ

// Days relative to 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);
bool valid_ymd(int year, unsigned month, unsigned day);

}  // namespace chronoweave
