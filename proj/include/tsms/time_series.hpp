#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsms/calendar.hpp"
#include "tsms/errors.hpp"
#include "tsms/value.hpp"

namespace tsms {

// Immutable view of one series over the inclusive calendar interval
// [start, end]. The name is the canonical functional expression that
// computes the series; it doubles as the DHT key.
class TimeSeries {
public:
    TimeSeries(std::string name, CalendarPtr calendar, std::size_t start,
               std::size_t end, std::vector<Value> values);

    const std::string& name() const { return name_; }
    const CalendarPtr& calendar() const { return calendar_; }
    std::size_t start() const { return start_; }
    std::size_t end() const { return end_; }
    std::size_t length() const { return end_ - start_ + 1; }

    std::span<const Value> values() const { return values_; }

    // Cell at an absolute calendar index inside [start, end].
    const Value& at(std::size_t calendar_index) const;

    // Sub-series over [from, to] (absolute calendar indices), same name.
    TimeSeries slice(std::size_t from, std::size_t to) const;

    bool same_frame(const TimeSeries& other) const {
        return calendar_ == other.calendar_ && start_ == other.start_ &&
               end_ == other.end_;
    }

private:
    std::string name_;
    CalendarPtr calendar_;
    std::size_t start_;
    std::size_t end_;
    std::vector<Value> values_;
};

} // namespace tsms
