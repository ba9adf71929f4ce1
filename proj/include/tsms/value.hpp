#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>

namespace tsms {

// A series cell is either a finite real number or one of two null kinds:
// Empty ("!") means no value exists at that instant (e.g. filtered out),
// Unknown ("?") means the value is not (yet) defined (padding, division by
// zero). NaN only ever appears in the I/O encoding, never in a Real cell.
enum class ValueKind : std::uint8_t { Real, Empty, Unknown };

class Value {
public:
    constexpr Value() : real_(0.0), kind_(ValueKind::Unknown) {}

    static Value real(double v) {
        assert(std::isfinite(v));
        return Value(v, ValueKind::Real);
    }
    static constexpr Value empty() { return Value(0.0, ValueKind::Empty); }
    static constexpr Value unknown() { return Value(0.0, ValueKind::Unknown); }

    // Non-finite doubles collapse to ?, the same rule the model applies to
    // division by zero.
    static Value real_or_unknown(double v) {
        return std::isfinite(v) ? real(v) : unknown();
    }

    ValueKind kind() const { return kind_; }
    bool is_real() const { return kind_ == ValueKind::Real; }
    bool is_empty() const { return kind_ == ValueKind::Empty; }
    bool is_unknown() const { return kind_ == ValueKind::Unknown; }

    double real_value() const {
        assert(is_real());
        return real_;
    }

    friend bool operator==(const Value& a, const Value& b) {
        if (a.kind_ != b.kind_) return false;
        return a.kind_ != ValueKind::Real || a.real_ == b.real_;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    constexpr Value(double v, ValueKind k) : real_(v), kind_(k) {}

    double real_;
    ValueKind kind_;
};

// Null precedence of pointwise arithmetic: ? wins over !, which wins over
// reals.  This is the closure of the model's null tables (!+! = !, !+? = ?,
// ?+? = ?) extended with Real(+)null = null.
inline Value value_add(const Value& a, const Value& b) {
    if (a.is_unknown() || b.is_unknown()) return Value::unknown();
    if (a.is_empty() || b.is_empty()) return Value::empty();
    return Value::real_or_unknown(a.real_value() + b.real_value());
}

// Scalar multiplication preserves null kinds: s*! = !, s*? = ?.
inline Value value_scale(double s, const Value& a) {
    if (!a.is_real()) return a;
    return Value::real_or_unknown(s * a.real_value());
}

inline Value value_sub(const Value& a, const Value& b) {
    return value_add(a, value_scale(-1.0, b));
}

inline Value value_mul(const Value& a, const Value& b) {
    if (a.is_unknown() || b.is_unknown()) return Value::unknown();
    if (a.is_empty() || b.is_empty()) return Value::empty();
    return Value::real_or_unknown(a.real_value() * b.real_value());
}

// Division by zero yields ?.
inline Value value_div(const Value& a, const Value& b) {
    if (a.is_unknown() || b.is_unknown()) return Value::unknown();
    if (a.is_empty() || b.is_empty()) return Value::empty();
    if (b.real_value() == 0.0) return Value::unknown();
    return Value::real_or_unknown(a.real_value() / b.real_value());
}

// Null kind of a tuple under the pointwise rule, or Real if all cells are.
inline ValueKind combine_kind(std::span<const Value> cells) {
    bool empty = false;
    for (const Value& v : cells) {
        if (v.is_unknown()) return ValueKind::Unknown;
        if (v.is_empty()) empty = true;
    }
    return empty ? ValueKind::Empty : ValueKind::Real;
}

// Null kind of a window aggregate: any ! poisons the whole window to !,
// otherwise any ? gives ?.
inline ValueKind window_kind(std::span<const Value> cells) {
    bool unknown = false;
    for (const Value& v : cells) {
        if (v.is_empty()) return ValueKind::Empty;
        if (v.is_unknown()) unknown = true;
    }
    return unknown ? ValueKind::Unknown : ValueKind::Real;
}

} // namespace tsms
