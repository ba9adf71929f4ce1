#include "doctest.h"

#include <random>

#include "tsms/indicators.hpp"
#include "tsms/series_math.hpp"

#include "helpers.hpp"

using namespace tsms;
using namespace testutil;

namespace {

const Value* padded_at(std::span<const Value> in, std::ptrdiff_t i) {
    return &in[i < 0 ? 0 : std::size_t(i)];
}

// O(w*n) direct-summation oracle for the moving average.
std::vector<Value> mavg_oracle(std::size_t w, std::span<const Value> in) {
    std::vector<Value> out;
    for (std::size_t t = 0; t < in.size(); ++t) {
        bool empty = false, unknown = false;
        double sum = 0;
        for (std::size_t k = 0; k < w; ++k) {
            const Value& v = *padded_at(in, std::ptrdiff_t(t) - std::ptrdiff_t(k));
            if (v.is_empty()) empty = true;
            else if (v.is_unknown()) unknown = true;
            else sum += v.real_value();
        }
        if (empty) out.push_back(Value::empty());
        else if (unknown) out.push_back(Value::unknown());
        else out.push_back(Value::real(sum / double(w)));
    }
    return out;
}

// Direct weighted-sum oracle for the exponential moving average.
std::vector<Value> xavg_oracle(std::size_t w, double alpha, std::span<const Value> in) {
    std::vector<Value> out;
    for (std::size_t t = 0; t < in.size(); ++t) {
        bool empty = false, unknown = false;
        double num = 0, den = 0;
        for (std::size_t lag = 0; lag < w; ++lag) {
            const Value& v = *padded_at(in, std::ptrdiff_t(t) - std::ptrdiff_t(lag));
            double weight = std::pow(1.0 - alpha, double(lag));
            den += weight;
            if (v.is_empty()) empty = true;
            else if (v.is_unknown()) unknown = true;
            else num += weight * v.real_value();
        }
        if (empty) out.push_back(Value::empty());
        else if (unknown) out.push_back(Value::unknown());
        else out.push_back(Value::real(num / den));
    }
    return out;
}

// Direct first-difference oracle for the RSI.
std::vector<Value> rsi_oracle(std::size_t w, std::span<const Value> in) {
    std::vector<Value> out;
    for (std::size_t t = 0; t < in.size(); ++t) {
        bool empty = false, unknown = false;
        for (std::size_t k = 0; k <= w; ++k) {
            const Value& v = *padded_at(in, std::ptrdiff_t(t) - std::ptrdiff_t(k));
            if (v.is_empty()) empty = true;
            else if (v.is_unknown()) unknown = true;
        }
        if (empty) { out.push_back(Value::empty()); continue; }
        if (unknown) { out.push_back(Value::unknown()); continue; }
        double gains = 0, losses = 0;
        for (std::size_t k = 0; k < w; ++k) {
            std::ptrdiff_t j = std::ptrdiff_t(t) - std::ptrdiff_t(k);
            double d = padded_at(in, j)->real_value() - padded_at(in, j - 1)->real_value();
            if (d > 0) gains += d;
            else losses -= d;
        }
        if (gains + losses == 0) out.push_back(Value::unknown());
        else out.push_back(Value::real(100.0 * (gains / (gains + losses))));
    }
    return out;
}

TimeSeries ramp(std::size_t n, double slope = 1.0, double offset = 0.0) {
    std::vector<Value> cells;
    for (std::size_t t = 0; t < n; ++t)
        cells.push_back(Value::real(offset + slope * double(t)));
    return make_series("RAMP", std::move(cells));
}

} // namespace

TEST_CASE("moving average examples") {
    auto s = make_series("S", {R(1), R(2), R(3), R(4), R(5)});
    auto v = mavg(s, 2);
    CHECK(values_equal(v.values(),
                       std::vector<Value>{R(1), R(1.5), R(2.5), R(3.5), R(4.5)}));
    CHECK(v.name() == "MAVG(S,2)");

    auto c = make_series("C", std::vector<Value>(8, R(3)));
    CHECK(values_match(mavg(c, 5).values(), c.values()));
    CHECK(values_equal(mavg(s, 1).values(), s.values()));
}

TEST_CASE("moving average equals the direct-summation oracle") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 1 + rng() % 200;
        const std::size_t w = 1 + rng() % 30;
        auto cells = random_cells(rng, n, 60);
        CHECK(values_match(mavg(make_series("S", cells), w).values(),
                           mavg_oracle(w, cells)));
    }
}

TEST_CASE("exponential moving average") {
    auto s = make_series("S", {R(3), R(6)});
    auto v = xavg(s, XavgParams(2, 0.5));
    CHECK(v.values()[1].is_real());
    CHECK(v.values()[1].real_value() == doctest::Approx(5.0).epsilon(1e-12));

    auto c = make_series("C", std::vector<Value>(6, R(7)));
    CHECK(values_match(xavg(c, XavgParams(4)).values(), c.values()));

    auto any = make_series("T", {R(5), R(9), R(2)});
    CHECK(values_equal(xavg(any, XavgParams(1)).values(), any.values()));

    // alpha = 1 zeroes every weight but the current entry.
    CHECK(values_equal(xavg(any, XavgParams(4, 1.0)).values(), any.values()));
    CHECK_THROWS_AS(xavg(any, XavgParams(4, 0.0)), ArityMismatch);
    CHECK_THROWS_AS(xavg(any, XavgParams(4, 1.5)), ArityMismatch);

    std::mt19937_64 rng(22);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 1 + rng() % 100;
        const std::size_t w = 1 + rng() % 20;
        auto cells = random_cells(rng, n, 40);
        XavgParams params(w);
        CHECK(values_match(xavg(make_series("S", cells), params).values(),
                           xavg_oracle(w, params.alpha, cells)));
    }
}

TEST_CASE("rsi examples") {
    auto up = make_series("UP", {R(1), R(2), R(3)});
    CHECK(rsi(up, 2).values()[2] == R(100));

    auto c = make_series("C", std::vector<Value>(5, R(4)));
    auto flat = rsi(c, 3);
    for (const Value& v : flat.values()) CHECK(v.is_unknown());

    auto down = make_series("DOWN", {R(3), R(2), R(1)});
    CHECK(rsi(down, 2).values()[2] == R(0));

    // At t=0 every padded difference is zero, so the very first entry is ?.
    CHECK(rsi(up, 2).values()[0].is_unknown());
}

TEST_CASE("rsi equals its difference oracle and stays in range") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 1 + rng() % 150;
        const std::size_t w = 1 + rng() % 25;
        auto cells = random_cells(rng, n, 50);
        auto r = rsi(make_series("S", cells), w);
        CHECK(values_match(r.values(), rsi_oracle(w, cells)));
        for (const Value& v : r.values()) {
            if (v.is_real()) {
                CHECK(v.real_value() >= 0.0);
                CHECK(v.real_value() <= 100.0);
            }
        }
    }
}

TEST_CASE("rsi is invariant under positive scaling") {
    std::mt19937_64 rng(24);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n = 2 + rng() % 100;
        auto s = make_series("S", random_cells(rng, n, 30));
        auto scaled = ts_scale(3.5, s);
        auto r1 = rsi(s, 7);
        auto r2 = rsi(scaled, 7);
        CHECK(values_match(r1.values(), r2.values()));
    }
}

TEST_CASE("momentum and shift") {
    auto s = make_series("S", {R(1), R(2), R(4)});
    CHECK(values_equal(mom(s, 2).values(), std::vector<Value>{R(0), R(1), R(3)}));

    auto c = make_series("C", std::vector<Value>(5, R(9)));
    auto still = mom(c, 3);
    for (const Value& v : still.values()) CHECK(v == R(0));

    CHECK(values_equal(shift(s).values(), std::vector<Value>{R(1), R(1), R(2)}));
    CHECK(values_equal(shift(c).values(), c.values()));

    auto twice = shift(shift(s));
    CHECK(twice.values()[2] == s.values()[0]);

    // MOM(S,w) is S - SHIFT^w(S) pointwise.
    std::mt19937_64 rng(25);
    auto r = make_series("Q", random_cells(rng, 40));
    TimeSeries lagged = r;
    for (int i = 0; i < 5; ++i) lagged = shift(lagged);
    std::vector<Value> diff;
    for (std::size_t t = 0; t < 40; ++t)
        diff.push_back(value_sub(r.values()[t], lagged.values()[t]));
    CHECK(values_equal(mom(r, 5).values(), diff));
}

TEST_CASE("macd on a ramp settles at half the window gap") {
    auto s = ramp(200);
    auto m = macd(s, 12, 26);
    // Window means of a ramp are t-(w-1)/2, so the difference settles at
    // (26-12)/2 = 7 once both windows are clear of the padded start.
    for (std::size_t t = 30; t < 200; ++t)
        CHECK(m.values()[t].real_value() == doctest::Approx(7.0).epsilon(1e-12));

    auto c = make_series("C", std::vector<Value>(40, R(5)));
    auto flat = macd(c, 12, 26);
    for (const Value& v : flat.values()) CHECK(v == R(0));

    auto swapped = ts_scale(-1, macd(s, 12, 26));
    // MINUS antisymmetry: swapping the windows flips the sign.
    auto wide = ts_minus(mavg(s, 26), mavg(s, 12));
    CHECK(values_match(swapped.values(), wide.values(), 1e-12));

    CHECK_THROWS_AS(macd(s, 26, 12), ArityMismatch);
    CHECK(m.name() == "MINUS(MAVG(RAMP,12),MAVG(RAMP,26))");
}

TEST_CASE("buy signal") {
    auto c = make_series("C", std::vector<Value>(60, R(5)));
    auto silent = buy_signal(c);
    for (const Value& v : silent.values()) CHECK(v.is_empty());

    auto up = ramp(120);
    auto buy = buy_signal(up);
    for (std::size_t t = 40; t < 120; ++t)
        CHECK(buy.values()[t].real_value() == doctest::Approx(7.0).epsilon(1e-12));

    auto down = ramp(120, -1.0, 2000.0);
    auto none = buy_signal(down);
    for (std::size_t t = 40; t < 120; ++t) CHECK(none.values()[t].is_empty());
}

TEST_CASE("sell signal") {
    auto c = make_series("C", std::vector<Value>(60, R(5)));
    auto silent = sell_signal(c);
    for (const Value& v : silent.values()) CHECK(v.is_empty());

    // Decreasing ramp 1000-t: kept exactly where the window-mean ratio
    // (1012.5-t)/(1005.5-t) exceeds 1.1.
    auto down = ramp(1000, -1.0, 1000.0);
    auto sells = sell_signal(down);
    for (std::size_t t = 30; t < 1000; ++t) {
        double expected_ratio = (1012.5 - double(t)) / (1005.5 - double(t));
        bool kept = sells.values()[t].is_real();
        CHECK(kept == (expected_ratio > 1.1));
    }

    // A zero short-window mean divides to ? and survives SEL as ?.
    std::vector<Value> zeros(30, R(0));
    auto z = sell_signal(make_series("Z", zeros));
    CHECK(z.values()[5].is_unknown());
}

TEST_CASE("buy and sell never fire together on a ramp") {
    for (double slope : {1.0, -1.0}) {
        auto s = ramp(300, slope, 5000.0);
        auto buy = buy_signal(s);
        auto sells = sell_signal(s);
        for (std::size_t t = 0; t < 300; ++t) {
            bool both = buy.values()[t].is_real() && sells.values()[t].is_real();
            CHECK_FALSE(both);
        }
    }
}

TEST_CASE("indicator outputs are causal") {
    std::mt19937_64 rng(26);
    auto cells = random_cells(rng, 60);
    auto mutated = cells;
    for (std::size_t i = 31; i < mutated.size(); ++i) mutated[i] = R(1e6);
    auto a = make_series("S", cells);
    auto b = make_series("S", mutated);
    for (std::size_t t = 0; t <= 30; ++t) {
        CHECK(mom(a, 4).values()[t] == mom(b, 4).values()[t]);
        CHECK(shift(a).values()[t] == shift(b).values()[t]);
        CHECK(mavg(a, 9).values()[t] == mavg(b, 9).values()[t]);
        CHECK(rsi(a, 9).values()[t] == rsi(b, 9).values()[t]);
    }
}
