#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chainnet {

// Timestamps are carried as UTC epoch seconds. Input format is the dataset's
// "YYYY-MM-DD HH:MM:SS UTC" (the " UTC" suffix is optional on input, always
// emitted on output).
std::int64_t parse_utc_timestamp(std::string_view s);  // throws DataError
std::string format_utc_timestamp(std::int64_t epoch_s);

int year_of_epoch(std::int64_t epoch_s);
std::int64_t year_start_epoch(int year);  // 00:00:00 UTC on Jan 1

std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t days, int& y, int& m, int& d);

}  // namespace chainnet
