#include "tsms/indicators.hpp"

#include "tsms/algebra.hpp"
#include "tsms/errors.hpp"
#include "tsms/kernels.hpp"
#include "tsms/series_math.hpp"
#include "tsms/series_name.hpp"

namespace tsms {

namespace {

void require_window(std::size_t w) {
    if (w < 1) throw ArityMismatch("window size must be at least 1");
}

} // namespace

TimeSeries mavg(const TimeSeries& s, std::size_t w) {
    require_window(w);
    return TimeSeries("MAVG(" + s.name() + "," + std::to_string(w) + ")", s.calendar(),
                      s.start(), s.end(), kernels::mavg(w, s.values()));
}

TimeSeries xavg(const TimeSeries& s, const XavgParams& params) {
    require_window(params.w);
    if (!(params.alpha > 0.0 && params.alpha <= 1.0))
        throw ArityMismatch("xavg alpha must lie in (0,1]");
    std::string name = "XAVG(" + s.name() + "," + std::to_string(params.w);
    if (params.alpha != XavgParams::default_alpha(params.w))
        name += "," + format_number(params.alpha);
    name += ")";
    return TimeSeries(std::move(name), s.calendar(), s.start(), s.end(),
                      kernels::xavg(params.w, params.alpha, s.values()));
}

TimeSeries rsi(const TimeSeries& s, std::size_t w) {
    require_window(w);
    return TimeSeries("RSI(" + s.name() + "," + std::to_string(w) + ")", s.calendar(),
                      s.start(), s.end(), kernels::rsi(w, s.values()));
}

TimeSeries mom(const TimeSeries& s, std::size_t w) {
    require_window(w);
    return TimeSeries("MOM(" + s.name() + "," + std::to_string(w) + ")", s.calendar(),
                      s.start(), s.end(), kernels::mom(w, s.values()));
}

TimeSeries shift(const TimeSeries& s) {
    return TimeSeries("SHIFT(" + s.name() + ")", s.calendar(), s.start(), s.end(),
                      kernels::shift(s.values()));
}

TimeSeries macd(const TimeSeries& s, std::size_t short_w, std::size_t long_w) {
    require_window(short_w);
    if (short_w >= long_w)
        throw ArityMismatch("macd short window must be smaller than the long one");
    return ts_minus(mavg(s, short_w), mavg(s, long_w));
}

TimeSeries buy_signal(const TimeSeries& s) {
    return sel(Predicate{CmpOp::Gt, 0.0}, mavg(macd(s, 12, 26), 9));
}

TimeSeries sell_signal(const TimeSeries& s) {
    return sel(Predicate{CmpOp::Gt, 1.1}, ts_divide(mavg(s, 26), mavg(s, 12)));
}

} // namespace tsms
