#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tsms {

enum class TimeUnit : std::uint8_t { Second, Minute, Hour, Day, Week };

std::string to_string(TimeUnit u);
TimeUnit time_unit_from_string(const std::string& s);

// Shared, strictly increasing list of instants. Every series of an engine
// instance references one calendar; all index arithmetic is positional and
// the unit is metadata only.
class Calendar {
public:
    // Labels are ISO-8601 date or date-time strings, kept verbatim for
    // output; they are parsed once to validate strict ordering.
    // Throws CalendarOrderError on a non-increasing label.
    Calendar(std::vector<std::string> labels, TimeUnit unit);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }
    TimeUnit unit() const { return unit_; }

    // Index of an exact label, or npos.
    std::size_t index_of(const std::string& label) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // Monotone key of a parsed ISO-8601 instant (nanoseconds on a civil
    // time line; no timezone arithmetic). Throws ParseError.
    static std::int64_t parse_instant(const std::string& iso);

private:
    std::vector<std::string> labels_;
    std::vector<std::int64_t> instants_;
    TimeUnit unit_;
};

using CalendarPtr = std::shared_ptr<const Calendar>;

// Synthetic calendar of n entries starting at 2000-01-01T00:00:00, one
// entry per unit step.
CalendarPtr make_synthetic_calendar(std::size_t n, TimeUnit unit = TimeUnit::Minute);

} // namespace tsms
