#include "tsms/series_math.hpp"

#include <cmath>

#include "tsms/algebra.hpp"
#include "tsms/errors.hpp"
#include "tsms/kernels.hpp"
#include "tsms/series_name.hpp"

namespace tsms {

TimeSeries ts_add(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries(commutative_pair_name("PLUS", a.name(), b.name()), a.calendar(),
                      a.start(), a.end(),
                      kernels::pointwise(kernels::PointwiseOp::Add, a.values(), b.values()));
}

TimeSeries ts_minus(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries("MINUS(" + a.name() + "," + b.name() + ")", a.calendar(),
                      a.start(), a.end(),
                      kernels::pointwise(kernels::PointwiseOp::Sub, a.values(), b.values()));
}

TimeSeries ts_mult(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries(commutative_pair_name("MULT", a.name(), b.name()), a.calendar(),
                      a.start(), a.end(),
                      kernels::pointwise(kernels::PointwiseOp::Mul, a.values(), b.values()));
}

TimeSeries ts_divide(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries("DIVIDE(" + a.name() + "," + b.name() + ")", a.calendar(),
                      a.start(), a.end(),
                      kernels::pointwise(kernels::PointwiseOp::Div, a.values(), b.values()));
}

TimeSeries ts_scale(double factor, const TimeSeries& s) {
    if (!std::isfinite(factor)) throw EngineError("scale factor must be finite");
    return TimeSeries("SCALE(" + s.name() + "," + format_number(factor) + ")",
                      s.calendar(), s.start(), s.end(),
                      kernels::scale(factor, s.values()));
}

} // namespace tsms
