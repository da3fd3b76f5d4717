#include "chainnet/timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "chainnet/error.hpp"

namespace chainnet {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

bool read_digits(std::string_view s, size_t pos, int n, int& out) {
    out = 0;
    for (int k = 0; k < n; ++k) {
        if (pos + k >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos + k])))
            return false;
        out = out * 10 + (s[pos + k] - '0');
    }
    return true;
}

}  // namespace

// Days since 1970-01-01 (proleptic Gregorian), Howard Hinnant's civil-days
// algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                         static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& y, int& m, int& d) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

std::int64_t parse_utc_timestamp(std::string_view s) {
    // "YYYY-MM-DD HH:MM:SS" with optional " UTC"
    int Y, M, D, h, mi, sec;
    bool ok = s.size() >= 19 && read_digits(s, 0, 4, Y) && s[4] == '-' &&
              read_digits(s, 5, 2, M) && s[7] == '-' && read_digits(s, 8, 2, D) &&
              s[10] == ' ' && read_digits(s, 11, 2, h) && s[13] == ':' &&
              read_digits(s, 14, 2, mi) && s[16] == ':' && read_digits(s, 17, 2, sec);
    if (ok) {
        std::string_view rest = s.substr(19);
        ok = rest.empty() || rest == " UTC";
    }
    if (ok) ok = M >= 1 && M <= 12 && D >= 1 && D <= days_in_month(Y, M) && h < 24 &&
                 mi < 60 && sec < 60;
    if (!ok) throw DataError("bad timestamp \"" + std::string(s) + "\"");
    return days_from_civil(Y, M, D) * 86400 + h * 3600 + mi * 60 + sec;
}

std::string format_utc_timestamp(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t sod = epoch_s % 86400;
    if (sod < 0) {
        sod += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d UTC", y, m, d,
                  int(sod / 3600), int(sod / 60 % 60), int(sod % 60));
    return buf;
}

int year_of_epoch(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    if (epoch_s % 86400 < 0) --days;
    int y, m, d;
    civil_from_days(days, y, m, d);
    return y;
}

std::int64_t year_start_epoch(int year) { return days_from_civil(year, 1, 1) * 86400; }

}  // namespace chainnet
