#include "tsms/algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "tsms/errors.hpp"
#include "tsms/kernels.hpp"
#include "tsms/series_name.hpp"

namespace tsms {

bool Predicate::holds(double v) const {
    switch (op) {
    case CmpOp::Gt: return v > threshold;
    case CmpOp::Lt: return v < threshold;
    case CmpOp::Ge: return v >= threshold;
    case CmpOp::Le: return v <= threshold;
    case CmpOp::Eq: return v == threshold;
    case CmpOp::Ne: return v != threshold;
    }
    return false;
}

std::string Predicate::to_string() const {
    const char* sym = "";
    switch (op) {
    case CmpOp::Gt: sym = ">"; break;
    case CmpOp::Lt: sym = "<"; break;
    case CmpOp::Ge: sym = ">="; break;
    case CmpOp::Le: sym = "<="; break;
    case CmpOp::Eq: sym = "="; break;
    case CmpOp::Ne: sym = "!="; break;
    }
    return sym + format_number(threshold);
}

Predicate Predicate::parse(const std::string& text) {
    CmpOp op;
    std::size_t skip = 0;
    if (text.rfind(">=", 0) == 0) { op = CmpOp::Ge; skip = 2; }
    else if (text.rfind("<=", 0) == 0) { op = CmpOp::Le; skip = 2; }
    else if (text.rfind("!=", 0) == 0) { op = CmpOp::Ne; skip = 2; }
    else if (text.rfind(">", 0) == 0) { op = CmpOp::Gt; skip = 1; }
    else if (text.rfind("<", 0) == 0) { op = CmpOp::Lt; skip = 1; }
    else if (text.rfind("=", 0) == 0) { op = CmpOp::Eq; skip = 1; }
    else throw ParseError("not a predicate: " + text);
    double v = 0;
    auto res = std::from_chars(text.data() + skip, text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ParseError("bad predicate threshold: " + text);
    return Predicate{op, v};
}

std::string to_string(MapFn f) {
    switch (f) {
    case MapFn::Identity: return "IDENTITY";
    case MapFn::Square: return "SQUARE";
    case MapFn::Abs: return "ABS";
    case MapFn::Exp: return "EXP";
    }
    return "IDENTITY";
}

MapFn map_fn_from_string(const std::string& s) {
    if (s == "IDENTITY") return MapFn::Identity;
    if (s == "SQUARE") return MapFn::Square;
    if (s == "ABS") return MapFn::Abs;
    if (s == "EXP") return MapFn::Exp;
    throw ParseError("unknown map function: " + s);
}

Value apply_map(MapFn f, const Value& v) {
    if (!v.is_real()) return v;
    double x = v.real_value();
    switch (f) {
    case MapFn::Identity: return v;
    case MapFn::Square: return Value::real_or_unknown(x * x);
    case MapFn::Abs: return Value::real(std::fabs(x));
    case MapFn::Exp: return Value::real_or_unknown(std::exp(x));
    }
    return v;
}

std::string to_string(CombineFn f) {
    switch (f) {
    case CombineFn::Sum: return "SUM";
    case CombineFn::Product: return "PRODUCT";
    case CombineFn::Max: return "MAX";
    case CombineFn::Min: return "MIN";
    case CombineFn::Avg: return "AVG";
    case CombineFn::Divide: return "DIVIDE";
    }
    return "SUM";
}

CombineFn combine_fn_from_string(const std::string& s) {
    if (s == "SUM") return CombineFn::Sum;
    if (s == "PRODUCT") return CombineFn::Product;
    if (s == "MAX") return CombineFn::Max;
    if (s == "MIN") return CombineFn::Min;
    if (s == "AVG") return CombineFn::Avg;
    if (s == "DIVIDE") return CombineFn::Divide;
    throw ParseError("unknown combine function: " + s);
}

namespace {

// All cells real; fold them.
Value combine_reals(CombineFn f, std::span<const Value> cells) {
    switch (f) {
    case CombineFn::Sum: {
        double acc = 0;
        for (const Value& v : cells) acc += v.real_value();
        return Value::real_or_unknown(acc);
    }
    case CombineFn::Product: {
        double acc = 1;
        for (const Value& v : cells) acc *= v.real_value();
        return Value::real_or_unknown(acc);
    }
    case CombineFn::Max: {
        double acc = cells.front().real_value();
        for (const Value& v : cells.subspan(1)) acc = std::max(acc, v.real_value());
        return Value::real(acc);
    }
    case CombineFn::Min: {
        double acc = cells.front().real_value();
        for (const Value& v : cells.subspan(1)) acc = std::min(acc, v.real_value());
        return Value::real(acc);
    }
    case CombineFn::Avg: {
        double acc = 0;
        for (const Value& v : cells) acc += v.real_value();
        return Value::real_or_unknown(acc / double(cells.size()));
    }
    case CombineFn::Divide: {
        double den = cells[1].real_value();
        if (den == 0.0) return Value::unknown();
        return Value::real_or_unknown(cells[0].real_value() / den);
    }
    }
    return Value::unknown();
}

} // namespace

Value apply_combine(CombineFn f, std::span<const Value> cells) {
    switch (combine_kind(cells)) {
    case ValueKind::Unknown: return Value::unknown();
    case ValueKind::Empty: return Value::empty();
    case ValueKind::Real: return combine_reals(f, cells);
    }
    return Value::unknown();
}

namespace detail {

Value apply_window_combine(CombineFn f, std::span<const Value> cells) {
    switch (window_kind(cells)) {
    case ValueKind::Empty: return Value::empty();
    case ValueKind::Unknown: return Value::unknown();
    case ValueKind::Real: return combine_reals(f, cells);
    }
    return Value::unknown();
}

void require_same_frame(const TimeSeries& a, const TimeSeries& b) {
    if (a.calendar() != b.calendar())
        throw CalendarMismatch("series " + a.name() + " and " + b.name() +
                               " use different calendars");
    if (a.start() != b.start() || a.end() != b.end())
        throw CalendarMismatch("series " + a.name() + " and " + b.name() +
                               " cover different intervals");
}

} // namespace detail

TimeSeries sel(const Predicate& pred, const TimeSeries& s) {
    return TimeSeries("SEL(" + s.name() + "," + pred.to_string() + ")", s.calendar(),
                      s.start(), s.end(), kernels::sel(pred, s.values()));
}

TimeSeries proj(MapFn fn, const TimeSeries& s) {
    return TimeSeries("PROJ(" + s.name() + "," + to_string(fn) + ")", s.calendar(),
                      s.start(), s.end(), kernels::proj(fn, s.values()));
}

TimeSeries ts_union(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries("UNION(" + a.name() + "," + b.name() + ")", a.calendar(),
                      a.start(), a.end(), kernels::set_union(a.values(), b.values()));
}

TimeSeries ts_intersect(const TimeSeries& a, const TimeSeries& b) {
    detail::require_same_frame(a, b);
    return TimeSeries("INTERSECT(" + a.name() + "," + b.name() + ")", a.calendar(),
                      a.start(), a.end(), kernels::set_intersect(a.values(), b.values()));
}

TimeSeries ts_join(CombineFn fn, std::span<const TimeSeries* const> inputs) {
    if (inputs.size() < 2) throw ArityMismatch("JOIN needs at least two series");
    if (fn == CombineFn::Divide && inputs.size() != 2)
        throw ArityMismatch("DIVIDE joins exactly two series");
    std::string name = "JOIN(";
    for (const TimeSeries* s : inputs) {
        detail::require_same_frame(*inputs.front(), *s);
        name += s->name() + ",";
    }
    name += to_string(fn) + ")";
    std::vector<std::span<const Value>> spans;
    spans.reserve(inputs.size());
    for (const TimeSeries* s : inputs) spans.push_back(s->values());
    return TimeSeries(std::move(name), inputs.front()->calendar(), inputs.front()->start(),
                      inputs.front()->end(), kernels::join(fn, spans));
}

TimeSeries ts_join(CombineFn fn, const std::vector<TimeSeries>& inputs) {
    std::vector<const TimeSeries*> ptrs;
    ptrs.reserve(inputs.size());
    for (const TimeSeries& s : inputs) ptrs.push_back(&s);
    return ts_join(fn, std::span<const TimeSeries* const>(ptrs));
}

TimeSeries win(CombineFn fn, WindowSpec spec, const TimeSeries& s) {
    if (spec.w < 1) throw ArityMismatch("window size must be at least 1");
    if (s.length() == 0) throw EmptySeries("win over empty series");
    if (fn == CombineFn::Divide && spec.w != 2)
        throw ArityMismatch("DIVIDE windows have exactly two entries");
    std::string name = "WIN(" + to_string(fn) + "," + std::to_string(spec.w) + "," +
                       s.name() + ")";
    return TimeSeries(std::move(name), s.calendar(), s.start(), s.end(),
                      kernels::win(fn, spec.w, s.values()));
}

} // namespace tsms
