#include "uma/time.hpp"

#include <chrono>
#include <cstdio>

namespace uma {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    int y, mo, d, h, mi, s;
    int consumed = 0;
    std::string buf(text);
    if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%*1[Tt]%2d:%2d:%2d%n", &y, &mo,
                    &d, &h, &mi, &s, &consumed) != 6 ||
        consumed != 19) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
        return std::nullopt;
    }
    std::size_t pos = 19;
    if (pos < buf.size() && buf[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }
    if (pos >= buf.size()) return std::nullopt;
    std::int64_t offset = 0;
    const char tzc = buf[pos];
    if (tzc == 'Z' || tzc == 'z') {
        ++pos;
    } else if (tzc == '+' || tzc == '-') {
        int oh, om;
        int n = 0;
        if (std::sscanf(buf.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n) !=
                2 ||
            n != 5 || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
        if (tzc == '-') offset = -offset;
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != buf.size()) return std::nullopt;
    const std::int64_t days = days_from_civil(y, mo, d);
    return days * 86400 + h * 3600 + mi * 60 + s - offset;
}

std::string format_rfc3339(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char out[32];
    std::snprintf(out, sizeof(out), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y,
                  m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return out;
}

Timestamp now_utc() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace uma
