#include "tsms/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "tsms/errors.hpp"

namespace tsms {

std::string to_string(TimeUnit u) {
    switch (u) {
    case TimeUnit::Second: return "second";
    case TimeUnit::Minute: return "minute";
    case TimeUnit::Hour: return "hour";
    case TimeUnit::Day: return "day";
    case TimeUnit::Week: return "week";
    }
    return "minute";
}

TimeUnit time_unit_from_string(const std::string& s) {
    if (s == "second") return TimeUnit::Second;
    if (s == "minute") return TimeUnit::Minute;
    if (s == "hour") return TimeUnit::Hour;
    if (s == "day") return TimeUnit::Day;
    if (s == "week") return TimeUnit::Week;
    throw ParseError("unknown time unit: " + s);
}

namespace {

long parse_int_field(const std::string& s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size()) throw ParseError("truncated instant: " + s);
    long v = 0;
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (res.ec != std::errc() || res.ptr != s.data() + pos + len)
        throw ParseError("bad numeric field in instant: " + s);
    return v;
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(long y, long m, long d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + static_cast<std::int64_t>(doe) - 719468LL;
}

} // namespace

std::int64_t Calendar::parse_instant(const std::string& iso) {
    // YYYY-MM-DD[Thh:mm:ss[.fraction]][Z]
    if (iso.size() < 10 || iso[4] != '-' || iso[7] != '-')
        throw ParseError("not an ISO-8601 instant: " + iso);
    long y = parse_int_field(iso, 0, 4);
    long mo = parse_int_field(iso, 5, 2);
    long d = parse_int_field(iso, 8, 2);
    if (mo < 1 || mo > 12 || d < 1 || d > 31)
        throw ParseError("out-of-range date: " + iso);
    long h = 0, mi = 0, se = 0;
    std::int64_t frac_ns = 0;
    std::size_t pos = 10;
    if (pos < iso.size() && (iso[pos] == 'T' || iso[pos] == ' ')) {
        if (iso.size() < pos + 9 || iso[pos + 3] != ':' || iso[pos + 6] != ':')
            throw ParseError("bad time-of-day in instant: " + iso);
        h = parse_int_field(iso, pos + 1, 2);
        mi = parse_int_field(iso, pos + 4, 2);
        se = parse_int_field(iso, pos + 7, 2);
        if (h > 23 || mi > 59 || se > 60)
            throw ParseError("out-of-range time in instant: " + iso);
        pos += 9;
        if (pos < iso.size() && iso[pos] == '.') {
            ++pos;
            std::int64_t scale = 100000000;
            while (pos < iso.size() && iso[pos] >= '0' && iso[pos] <= '9') {
                if (scale > 0) frac_ns += (iso[pos] - '0') * scale;
                scale /= 10;
                ++pos;
            }
        }
    }
    if (pos < iso.size() && iso[pos] == 'Z') ++pos;
    if (pos != iso.size()) throw ParseError("trailing characters in instant: " + iso);
    std::int64_t ns = days_from_civil(y, mo, d) * 86400LL;
    ns = (ns + h * 3600 + mi * 60 + se) * 1000000000LL + frac_ns;
    return ns;
}

Calendar::Calendar(std::vector<std::string> labels, TimeUnit unit)
    : labels_(std::move(labels)), unit_(unit) {
    if (labels_.empty()) throw CalendarOrderError("calendar must have at least one entry");
    instants_.reserve(labels_.size());
    for (const auto& l : labels_) instants_.push_back(parse_instant(l));
    for (std::size_t i = 1; i < instants_.size(); ++i) {
        if (instants_[i] <= instants_[i - 1])
            throw CalendarOrderError("calendar not strictly increasing at entry " +
                                     std::to_string(i) + ": " + labels_[i]);
    }
}

std::size_t Calendar::index_of(const std::string& label) const {
    std::int64_t key = parse_instant(label);
    auto it = std::lower_bound(instants_.begin(), instants_.end(), key);
    if (it == instants_.end() || *it != key) return npos;
    return static_cast<std::size_t>(it - instants_.begin());
}

CalendarPtr make_synthetic_calendar(std::size_t n, TimeUnit unit) {
    std::int64_t step_s = 60;
    switch (unit) {
    case TimeUnit::Second: step_s = 1; break;
    case TimeUnit::Minute: step_s = 60; break;
    case TimeUnit::Hour: step_s = 3600; break;
    case TimeUnit::Day: step_s = 86400; break;
    case TimeUnit::Week: step_s = 7 * 86400; break;
    }
    std::vector<std::string> labels;
    labels.reserve(n);
    const std::int64_t t0 = days_from_civil(2000, 1, 1) * 86400LL;
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t t = t0 + std::int64_t(i) * step_s;
        std::int64_t days = t / 86400;
        std::int64_t sod = t % 86400;
        // invert days_from_civil
        std::int64_t z = days + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                      static_cast<long long>(y + (m <= 2)), m, d,
                      static_cast<long long>(sod / 3600),
                      static_cast<long long>((sod % 3600) / 60),
                      static_cast<long long>(sod % 60));
        labels.emplace_back(buf);
    }
    return std::make_shared<const Calendar>(std::move(labels), unit);
}

} // namespace tsms
