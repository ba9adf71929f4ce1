#include "tsms/kernels.hpp"

#include <cmath>

#include "tsms/errors.hpp"

namespace tsms::kernels {

namespace {

// Read position i of the slice; indices before it yield its first cell.
inline const Value& padded(std::span<const Value> in, std::ptrdiff_t i) {
    return in[i < 0 ? 0 : static_cast<std::size_t>(i)];
}

} // namespace

std::vector<Value> pointwise(PointwiseOp op, std::span<const Value> a,
                             std::span<const Value> b) {
    if (a.size() != b.size())
        throw EngineError("pointwise operands of different length");
    std::vector<Value> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        switch (op) {
        case PointwiseOp::Add: out.push_back(value_add(a[i], b[i])); break;
        case PointwiseOp::Sub: out.push_back(value_sub(a[i], b[i])); break;
        case PointwiseOp::Mul: out.push_back(value_mul(a[i], b[i])); break;
        case PointwiseOp::Div: out.push_back(value_div(a[i], b[i])); break;
        }
    }
    return out;
}

std::vector<Value> scale(double factor, std::span<const Value> in) {
    std::vector<Value> out;
    out.reserve(in.size());
    for (const Value& v : in) out.push_back(value_scale(factor, v));
    return out;
}

std::vector<Value> sel(const Predicate& pred, std::span<const Value> in) {
    std::vector<Value> out;
    out.reserve(in.size());
    for (const Value& v : in) {
        if (v.is_real())
            out.push_back(pred.holds(v.real_value()) ? v : Value::empty());
        else
            out.push_back(v);
    }
    return out;
}

std::vector<Value> proj(MapFn fn, std::span<const Value> in) {
    std::vector<Value> out;
    out.reserve(in.size());
    for (const Value& v : in) out.push_back(apply_map(fn, v));
    return out;
}

std::vector<Value> set_union(std::span<const Value> a, std::span<const Value> b) {
    if (a.size() != b.size()) throw EngineError("union operands of different length");
    std::vector<Value> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(a[i].is_empty() ? b[i] : a[i]);
    return out;
}

std::vector<Value> set_intersect(std::span<const Value> a, std::span<const Value> b) {
    if (a.size() != b.size()) throw EngineError("intersect operands of different length");
    std::vector<Value> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_real() && b[i].is_real() && a[i].real_value() == b[i].real_value())
            out.push_back(a[i]);
        else
            out.push_back(Value::empty());
    }
    return out;
}

std::vector<Value> join(CombineFn fn, std::span<const std::span<const Value>> inputs) {
    if (inputs.size() < 2) throw ArityMismatch("join needs at least two inputs");
    if (fn == CombineFn::Divide && inputs.size() != 2)
        throw ArityMismatch("DIVIDE joins exactly two inputs");
    const std::size_t n = inputs.front().size();
    for (const auto& s : inputs)
        if (s.size() != n) throw EngineError("join inputs of different length");
    std::vector<Value> out;
    out.reserve(n);
    std::vector<Value> tuple(inputs.size());
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < inputs.size(); ++k) tuple[k] = inputs[k][t];
        out.push_back(apply_combine(fn, tuple));
    }
    return out;
}

std::vector<Value> win(CombineFn fn, std::size_t w, std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    std::vector<Value> window(w);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < w; ++k)
            window[k] = padded(in, std::ptrdiff_t(t) - std::ptrdiff_t(w) + 1 +
                                       std::ptrdiff_t(k));
        out.push_back(detail::apply_window_combine(fn, window));
    }
    return out;
}

std::vector<Value> mavg(std::size_t w, std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    if (n == 0) return out;

    // Sliding state: running sum of the real cells in the window plus null
    // counters, updated with one add and one subtract per step.
    double sum = 0.0;
    std::size_t empties = 0, unknowns = 0;
    auto add_cell = [&](const Value& v) {
        if (v.is_real()) sum += v.real_value();
        else if (v.is_empty()) ++empties;
        else ++unknowns;
    };
    auto drop_cell = [&](const Value& v) {
        if (v.is_real()) sum -= v.real_value();
        else if (v.is_empty()) --empties;
        else --unknowns;
    };
    auto emit = [&]() {
        if (empties) out.push_back(Value::empty());
        else if (unknowns) out.push_back(Value::unknown());
        else out.push_back(Value::real_or_unknown(sum / double(w)));
    };

    // Window at t=0 is w padded copies of the first cell.
    for (std::size_t k = 0; k < w; ++k) add_cell(in[0]);
    emit();
    for (std::size_t t = 1; t < n; ++t) {
        add_cell(in[t]);
        drop_cell(padded(in, std::ptrdiff_t(t) - std::ptrdiff_t(w)));
        emit();
    }
    return out;
}

std::vector<Value> xavg(std::size_t w, double alpha, std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    if (n == 0) return out;
    std::vector<double> weight(w);
    double denom = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
        weight[i] = std::pow(1.0 - alpha, double(i));
        denom += weight[i];
    }
    for (std::size_t t = 0; t < n; ++t) {
        bool empty = false, unknown = false;
        double num = 0.0;
        for (std::size_t i = 0; i < w; ++i) { // i = lag
            const Value& v = padded(in, std::ptrdiff_t(t) - std::ptrdiff_t(i));
            if (v.is_empty()) { empty = true; break; }
            if (v.is_unknown()) { unknown = true; continue; }
            num += weight[i] * v.real_value();
        }
        if (empty) out.push_back(Value::empty());
        else if (unknown) out.push_back(Value::unknown());
        else out.push_back(Value::real_or_unknown(num / denom));
    }
    return out;
}

std::vector<Value> rsi(std::size_t w, std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        // The window spans the w+1 cells feeding the w differences.
        bool empty = false, unknown = false;
        for (std::size_t k = 0; k <= w; ++k) {
            const Value& v = padded(in, std::ptrdiff_t(t) - std::ptrdiff_t(k));
            if (v.is_empty()) { empty = true; break; }
            if (v.is_unknown()) unknown = true;
        }
        if (empty) { out.push_back(Value::empty()); continue; }
        if (unknown) { out.push_back(Value::unknown()); continue; }
        double gains = 0.0, losses = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            std::ptrdiff_t j = std::ptrdiff_t(t) - std::ptrdiff_t(k);
            double d = padded(in, j).real_value() - padded(in, j - 1).real_value();
            if (d > 0) gains += d;
            else losses -= d;
        }
        double total = gains + losses;
        if (total == 0.0) out.push_back(Value::unknown());
        // gains/total <= 1 exactly, so the result stays within [0,100].
        else out.push_back(Value::real_or_unknown(100.0 * (gains / total)));
    }
    return out;
}

std::vector<Value> mom(std::size_t w, std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t)
        out.push_back(value_sub(in[t], padded(in, std::ptrdiff_t(t) - std::ptrdiff_t(w))));
    return out;
}

std::vector<Value> shift(std::span<const Value> in) {
    const std::size_t n = in.size();
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t)
        out.push_back(padded(in, std::ptrdiff_t(t) - 1));
    return out;
}

} // namespace tsms::kernels
