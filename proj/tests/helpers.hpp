#pragma once

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "tsms/calendar.hpp"
#include "tsms/time_series.hpp"

namespace testutil {

using tsms::Value;

inline Value R(double v) { return Value::real(v); }
inline Value E() { return Value::empty(); }
inline Value U() { return Value::unknown(); }

// One shared calendar per length so series of equal length sit on the same
// frame.
inline tsms::CalendarPtr cal_of(std::size_t n) {
    static std::map<std::size_t, tsms::CalendarPtr> cache;
    auto& c = cache[n];
    if (!c) c = tsms::make_synthetic_calendar(n);
    return c;
}

inline tsms::TimeSeries make_series(std::string name, std::vector<Value> values) {
    const std::size_t n = values.size();
    return tsms::TimeSeries(std::move(name), cal_of(n), 0, n - 1, std::move(values));
}

inline bool close(double a, double b, double rel) {
    if (a == b) return true;
    double diff = std::fabs(a - b);
    // Absolute floor for near-zero results of cancelling subtractions
    // (quote data sits around 1e2, so 1e-9 is ~1e-11 of the data scale).
    return diff <= rel * std::max(std::fabs(a), std::fabs(b)) || diff <= 1e-9;
}

// Same null pattern, reals within the relative tolerance.
inline bool values_match(std::span<const Value> a, std::span<const Value> b,
                         double rel = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].kind() != b[i].kind()) return false;
        if (a[i].is_real() && !close(a[i].real_value(), b[i].real_value(), rel))
            return false;
    }
    return true;
}

inline bool values_equal(std::span<const Value> a, std::span<const Value> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// Random positive quote-like cells; null_permille of them are nulls.
inline std::vector<Value> random_cells(std::mt19937_64& rng, std::size_t n,
                                       int null_permille = 0) {
    std::uniform_real_distribution<double> level(50.0, 150.0);
    std::uniform_int_distribution<int> roll(0, 999);
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int r = roll(rng);
        if (r < null_permille / 2) out.push_back(Value::empty());
        else if (r < null_permille) out.push_back(Value::unknown());
        else out.push_back(Value::real(level(rng)));
    }
    return out;
}

// Cells whose reals are dyadic rationals (k/8), so sums and small products
// stay exact in double arithmetic.
inline std::vector<Value> random_dyadic_cells(std::mt19937_64& rng, std::size_t n,
                                              int null_permille = 100) {
    std::uniform_int_distribution<int> num(-800, 800);
    std::uniform_int_distribution<int> roll(0, 999);
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        int r = roll(rng);
        if (r < null_permille / 2) out.push_back(Value::empty());
        else if (r < null_permille) out.push_back(Value::unknown());
        else out.push_back(Value::real(double(num(rng)) / 8.0));
    }
    return out;
}

} // namespace testutil
