#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsms/expr.hpp"
#include "tsms/time_series.hpp"

namespace tsms {

struct SegmentSpec {
    std::size_t seg_len = 1024;
    std::size_t overlap = 128; // must stay < seg_len
};

// A slice of a series: the core [core_start, core_start+core_len) tiles the
// calendar, values add overlap margins on both sides (clipped at calendar
// start, ?-padded past the last real entry). Only core cells are
// authoritative; margin outputs are discarded at assembly.
struct Segment {
    std::string series_name;
    std::size_t ordinal = 0;
    std::size_t core_start = 0;
    std::size_t core_len = 0;      // seg_len, including trailing ? padding
    std::size_t core_end_real = 0; // exclusive, min(core_start+core_len, n)
    std::size_t values_start = 0;  // max(0, core_start-overlap)
    std::vector<Value> values;

    std::size_t values_end() const { return values_start + values.size(); }
    // Real (unpadded) core cells.
    std::span<const Value> core_span() const {
        return std::span<const Value>(values).subspan(core_start - values_start,
                                                      core_end_real - core_start);
    }
};

// Geometry of segment `ordinal` for a series of n entries; values, name
// left empty.
Segment segment_frame(std::size_t ordinal, const SegmentSpec& spec, std::size_t n);

std::size_t segment_count(std::size_t n, const SegmentSpec& spec);

// Split a series starting at calendar index 0 into ceil(n/seg_len)
// segments.
std::vector<Segment> split(const TimeSeries& s, const SegmentSpec& spec);

// Concatenate core regions restricted to the interval; overlap margins and
// trailing ? pads are dropped. Throws CoverageGap listing missing ranges.
TimeSeries assemble(const std::vector<Segment>& parts, const QueryInterval& interval,
                    const CalendarPtr& calendar);

// Ordinals whose core intersects the interval.
std::vector<std::size_t> locate(const QueryInterval& interval, const SegmentSpec& spec);

// A window of w entries needs w-1 predecessors, so it can be computed
// locally iff w-1 <= overlap.
bool window_feasible(std::size_t w, const SegmentSpec& spec);

} // namespace tsms
