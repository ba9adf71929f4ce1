#pragma once

#include "tsms/time_series.hpp"

namespace tsms {

struct XavgParams {
    std::size_t w = 1;
    double alpha;       // in (0, 1]

    explicit XavgParams(std::size_t w_) : w(w_), alpha(default_alpha(w_)) {}
    XavgParams(std::size_t w_, double alpha_) : w(w_), alpha(alpha_) {}
    static double default_alpha(std::size_t w) { return 2.0 / (double(w) + 1.0); }
};

// Simple moving average over w entries, O(1) per step. Name MAVG(s,w).
TimeSeries mavg(const TimeSeries& s, std::size_t w);

// Exponentially weighted window average. Name XAVG(s,w) or XAVG(s,w,alpha).
TimeSeries xavg(const TimeSeries& s, const XavgParams& params);

// Relative strength index over w first differences; values in [0,100] or ?.
// Name RSI(s,w).
TimeSeries rsi(const TimeSeries& s, std::size_t w);

// Momentum S[t] - S[t-w]. Name MOM(s,w).
TimeSeries mom(const TimeSeries& s, std::size_t w);

// One-step lag, SHIFT(s).
TimeSeries shift(const TimeSeries& s);

// Difference of a short and a long moving average,
// MINUS(MAVG(s,short),MAVG(s,long)). Requires short < long.
TimeSeries macd(const TimeSeries& s, std::size_t short_w, std::size_t long_w);

// Buy events: SEL(MAVG(MINUS(MAVG(s,12),MAVG(s,26)),9),>0); the non-!
// entries signal a buy.
TimeSeries buy_signal(const TimeSeries& s);

// Sell events: SEL(DIVIDE(MAVG(s,26),MAVG(s,12)),>1.1).
TimeSeries sell_signal(const TimeSeries& s);

} // namespace tsms
