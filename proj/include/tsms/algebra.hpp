#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsms/time_series.hpp"

namespace tsms {

// Threshold comparison on real cells. Comparisons are exact: inputs are
// stored quotes, not computed values.
enum class CmpOp : std::uint8_t { Gt, Lt, Ge, Le, Eq, Ne };

struct Predicate {
    CmpOp op;
    double threshold;

    bool holds(double v) const;
    std::string to_string() const;          // ">0", ">=1.1", "!=2", ...
    static Predicate parse(const std::string& text);
};

// Built-in unary map functions for PROJ. They act on real cells; nulls pass
// through unchanged.
enum class MapFn : std::uint8_t { Identity, Square, Abs, Exp };

std::string to_string(MapFn f);
MapFn map_fn_from_string(const std::string& s);
Value apply_map(MapFn f, const Value& v);

// Built-in combine functions for JOIN and WIN. Divide is binary-only.
enum class CombineFn : std::uint8_t { Sum, Product, Max, Min, Avg, Divide };

std::string to_string(CombineFn f);
CombineFn combine_fn_from_string(const std::string& s);

// Combine a tuple of cells: any ? makes the result ?, otherwise any !
// makes it !, otherwise the function is applied to the reals.
Value apply_combine(CombineFn f, std::span<const Value> cells);

struct WindowSpec {
    std::size_t w = 1; // window length in entries, >= 1
};

namespace detail {
// Window-style combine: any ! in the cells gives !, else any ? gives ?.
Value apply_window_combine(CombineFn f, std::span<const Value> cells);
// Throws CalendarMismatch unless both series share calendar and interval.
void require_same_frame(const TimeSeries& a, const TimeSeries& b);
} // namespace detail

// Keep a real cell when the predicate holds, replace it by ! when it does
// not; ! stays !, ? stays ? (whether it satisfies is itself unknown).
TimeSeries sel(const Predicate& pred, const TimeSeries& s);

// Map every real cell through fn; nulls pass through.
TimeSeries proj(MapFn fn, const TimeSeries& s);

// Outer union: take the non-! side; both ! gives !; when both sides carry
// a value the left operand wins.
TimeSeries ts_union(const TimeSeries& a, const TimeSeries& b);

// Intersection keeps a cell only when both sides are real and equal;
// everything else (including matching nulls) gives !.
TimeSeries ts_intersect(const TimeSeries& a, const TimeSeries& b);

// k-ary join over series on the same calendar/interval: pointwise fn over
// the k-tuple, one pass. Throws ArityMismatch for Divide with k != 2.
TimeSeries ts_join(CombineFn fn, std::span<const TimeSeries* const> inputs);
TimeSeries ts_join(CombineFn fn, const std::vector<TimeSeries>& inputs);

// Generic backward window: result[t] = fn over the w entries [t-w+1, t];
// indices before the interval read as its first value. A window containing
// ! yields !, else one containing ? yields ?.
TimeSeries win(CombineFn fn, WindowSpec spec, const TimeSeries& s);

} // namespace tsms
