#pragma once

#include "tsms/time_series.hpp"

namespace tsms {

// Vector-space operations. All of them are pure: inputs are untouched and
// the result is a fresh series whose name is the canonical expression.

// Pointwise sum, name PLUS(a,b) with commutative argument ordering.
// Throws CalendarMismatch when calendars or intervals differ.
TimeSeries ts_add(const TimeSeries& a, const TimeSeries& b);

// Pointwise difference, name MINUS(a,b).
TimeSeries ts_minus(const TimeSeries& a, const TimeSeries& b);

// Pointwise product, name MULT(a,b) with commutative argument ordering.
TimeSeries ts_mult(const TimeSeries& a, const TimeSeries& b);

// Pointwise quotient, name DIVIDE(a,b); x/0 gives ?.
TimeSeries ts_divide(const TimeSeries& a, const TimeSeries& b);

// Scalar multiple, name SCALE(s,factor). Null kinds are preserved.
TimeSeries ts_scale(double factor, const TimeSeries& s);

} // namespace tsms
