#include "tsms/segment.hpp"

#include <algorithm>

#include "tsms/errors.hpp"

namespace tsms {

namespace {

void require_spec(const SegmentSpec& spec) {
    if (spec.seg_len < 1) throw EngineError("segment length must be at least 1");
    if (spec.overlap >= spec.seg_len)
        throw EngineError("overlap must be smaller than the segment length");
}

} // namespace

std::size_t segment_count(std::size_t n, const SegmentSpec& spec) {
    require_spec(spec);
    return (n + spec.seg_len - 1) / spec.seg_len;
}

Segment segment_frame(std::size_t ordinal, const SegmentSpec& spec, std::size_t n) {
    require_spec(spec);
    Segment seg;
    seg.ordinal = ordinal;
    seg.core_start = ordinal * spec.seg_len;
    seg.core_len = spec.seg_len;
    seg.core_end_real = std::min(seg.core_start + spec.seg_len, n);
    if (seg.core_start >= n)
        throw EngineError("segment ordinal " + std::to_string(ordinal) +
                          " beyond series of " + std::to_string(n) + " entries");
    seg.values_start = seg.core_start > spec.overlap ? seg.core_start - spec.overlap : 0;
    // The right margin carries real data only; an incomplete core is
    // ?-padded to core_len.
    std::size_t hi = std::max(seg.core_start + spec.seg_len,
                              std::min(seg.core_start + spec.seg_len + spec.overlap, n));
    seg.values.assign(hi - seg.values_start, Value::unknown());
    return seg;
}

std::vector<Segment> split(const TimeSeries& s, const SegmentSpec& spec) {
    if (s.start() != 0)
        throw EngineError("split expects a series anchored at calendar index 0");
    const std::size_t n = s.end() + 1;
    std::vector<Segment> out;
    const std::size_t count = segment_count(n, spec);
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        Segment seg = segment_frame(j, spec, n);
        seg.series_name = s.name();
        const std::size_t real_end = std::min(seg.values_end(), n);
        for (std::size_t i = seg.values_start; i < real_end; ++i)
            seg.values[i - seg.values_start] = s.values()[i];
        out.push_back(std::move(seg));
    }
    return out;
}

TimeSeries assemble(const std::vector<Segment>& parts, const QueryInterval& interval,
                    const CalendarPtr& calendar) {
    if (interval.start > interval.end) throw EngineError("empty assembly interval");
    std::vector<Value> values(interval.end - interval.start + 1, Value::unknown());
    std::vector<bool> covered(values.size(), false);
    std::string name = parts.empty() ? std::string() : parts.front().series_name;
    for (const Segment& seg : parts) {
        const std::size_t lo = std::max(seg.core_start, interval.start);
        const std::size_t hi = std::min(seg.core_end_real, interval.end + 1);
        for (std::size_t i = lo; i < hi; ++i) {
            values[i - interval.start] = seg.values[i - seg.values_start];
            covered[i - interval.start] = true;
        }
    }
    // Report gaps as compact ranges.
    std::string gaps;
    for (std::size_t i = 0; i < covered.size();) {
        if (covered[i]) { ++i; continue; }
        std::size_t j = i;
        while (j < covered.size() && !covered[j]) ++j;
        if (!gaps.empty()) gaps += ", ";
        gaps += "[" + std::to_string(interval.start + i) + "," +
                std::to_string(interval.start + j - 1) + "]";
        i = j;
    }
    if (!gaps.empty()) throw CoverageGap("missing core ranges: " + gaps);
    return TimeSeries(std::move(name), calendar, interval.start, interval.end,
                      std::move(values));
}

std::vector<std::size_t> locate(const QueryInterval& interval, const SegmentSpec& spec) {
    require_spec(spec);
    if (interval.start > interval.end) return {};
    std::vector<std::size_t> out;
    for (std::size_t j = interval.start / spec.seg_len; j <= interval.end / spec.seg_len;
         ++j)
        out.push_back(j);
    return out;
}

bool window_feasible(std::size_t w, const SegmentSpec& spec) {
    require_spec(spec);
    return w >= 1 && w - 1 <= spec.overlap;
}

} // namespace tsms
