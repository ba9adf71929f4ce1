#include "tsms/time_series.hpp"

namespace tsms {

TimeSeries::TimeSeries(std::string name, CalendarPtr calendar, std::size_t start,
                       std::size_t end, std::vector<Value> values)
    : name_(std::move(name)), calendar_(std::move(calendar)), start_(start),
      end_(end), values_(std::move(values)) {
    if (!calendar_) throw EngineError("series without calendar");
    if (start_ > end_ || end_ >= calendar_->size())
        throw EngineError("series interval [" + std::to_string(start_) + "," +
                          std::to_string(end_) + "] outside calendar of " +
                          std::to_string(calendar_->size()) + " entries");
    if (values_.size() != end_ - start_ + 1)
        throw EngineError("series value count " + std::to_string(values_.size()) +
                          " does not match interval length " +
                          std::to_string(end_ - start_ + 1));
}

const Value& TimeSeries::at(std::size_t calendar_index) const {
    if (calendar_index < start_ || calendar_index > end_)
        throw EngineError("index " + std::to_string(calendar_index) +
                          " outside series interval");
    return values_[calendar_index - start_];
}

TimeSeries TimeSeries::slice(std::size_t from, std::size_t to) const {
    if (from < start_ || to > end_ || from > to)
        throw EngineError("slice [" + std::to_string(from) + "," + std::to_string(to) +
                          "] outside series interval [" + std::to_string(start_) + "," +
                          std::to_string(end_) + "]");
    std::vector<Value> vals(values_.begin() + (from - start_),
                            values_.begin() + (to - start_ + 1));
    return TimeSeries(name_, calendar_, from, to, std::move(vals));
}

} // namespace tsms
