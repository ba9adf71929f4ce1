#include "doctest.h"

#include <array>
#include <random>

#include "tsms/series_math.hpp"
#include "tsms/value.hpp"

#include "helpers.hpp"

using namespace tsms;
using namespace testutil;

TEST_CASE("null addition table over all nine kind pairs") {
    // Null rows pinned by the model: !+!=!, !+?=?, ?+?=? (symmetric), plus
    // real-null mixing where the null wins.
    const Value r2 = R(2), r3 = R(3);
    CHECK(value_add(E(), E()) == E());
    CHECK(value_add(E(), U()) == U());
    CHECK(value_add(U(), E()) == U());
    CHECK(value_add(U(), U()) == U());
    CHECK(value_add(r2, r3) == R(5));
    CHECK(value_add(r2, E()) == E());
    CHECK(value_add(E(), r2) == E());
    CHECK(value_add(r2, U()) == U());
    CHECK(value_add(U(), r2) == U());
}

TEST_CASE("null scaling table") {
    CHECK(value_scale(3, E()) == E());
    CHECK(value_scale(3, U()) == U());
    CHECK(value_scale(0, R(7)) == R(0));
    CHECK(value_scale(-2, R(7)) == R(-14));
}

TEST_CASE("series addition") {
    auto a = make_series("A", {R(1), R(2), R(3)});
    auto b = make_series("B", {R(4), R(5), R(6)});
    auto sum = ts_add(a, b);
    CHECK(values_equal(sum.values(), std::vector<Value>{R(5), R(7), R(9)}));
    CHECK(sum.name() == "PLUS(A,B)");

    auto nulls = make_series("N", {R(1), E(), U()});
    auto ones = make_series("I", {R(1), R(1), R(1)});
    CHECK(values_equal(ts_add(nulls, ones).values(),
                       std::vector<Value>{R(2), E(), U()}));

    auto zero = make_series("ZERO", {R(0), R(0), R(0)});
    CHECK(values_equal(ts_add(a, zero).values(), a.values()));
}

TEST_CASE("series addition requires one frame") {
    auto a = make_series("A", {R(1), R(2), R(3)});
    auto b = make_series("B", {R(1), R(2)});
    CHECK_THROWS_AS(ts_add(a, b), CalendarMismatch);
    auto sliced = a.slice(0, 1);
    CHECK_THROWS_AS(ts_add(a, sliced), CalendarMismatch);
}

TEST_CASE("series scaling") {
    auto s = make_series("S", {R(1), R(2), E()});
    auto scaled = ts_scale(100, s);
    CHECK(values_equal(scaled.values(), std::vector<Value>{R(100), R(200), E()}));
    CHECK(scaled.name() == "SCALE(S,100)");
    CHECK(values_equal(ts_scale(1, s).values(), s.values()));
    auto twice = ts_scale(3, ts_scale(2, s));
    CHECK(values_equal(twice.values(), ts_scale(6, s).values()));
}

TEST_CASE("series subtraction and product") {
    auto a = make_series("A", {R(5), R(7)});
    auto b = make_series("B", {R(1), R(2)});
    CHECK(values_equal(ts_minus(a, b).values(), std::vector<Value>{R(4), R(5)}));
    CHECK(values_equal(ts_minus(a, a).values(), std::vector<Value>{R(0), R(0)}));

    auto u = make_series("U", {R(1), U()});
    auto ones = make_series("I", {R(1), R(1)});
    CHECK(values_equal(ts_minus(u, ones).values(), std::vector<Value>{R(0), U()}));

    auto m1 = make_series("M1", {R(2), R(3)});
    auto m2 = make_series("M2", {R(4), R(5)});
    CHECK(values_equal(ts_mult(m1, m2).values(), std::vector<Value>{R(8), R(15)}));
    auto mn = make_series("MN", {E(), U()});
    CHECK(values_equal(ts_mult(m1, mn).values(), std::vector<Value>{E(), U()}));
    auto one = make_series("ONE", {R(1), R(1)});
    CHECK(values_equal(ts_mult(m1, one).values(), m1.values()));
}

TEST_CASE("division by zero yields ?") {
    auto a = make_series("A", {R(4), R(4), E()});
    auto b = make_series("B", {R(2), R(0), R(1)});
    CHECK(values_equal(ts_divide(a, b).values(), std::vector<Value>{R(2), U(), E()}));
}

TEST_CASE("vector space axioms on random null-bearing series") {
    std::mt19937_64 rng(20240517);
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t n = 1 + rng() % 40;
        // Dyadic reals keep double sums and products exact, so the axioms
        // hold bit-for-bit.
        auto s1 = make_series("S1", random_dyadic_cells(rng, n));
        auto s2 = make_series("S2", random_dyadic_cells(rng, n));
        auto s3 = make_series("S3", random_dyadic_cells(rng, n));
        double k = double(int(rng() % 1600) - 800) / 8.0;

        CHECK(values_equal(ts_add(s1, s2).values(), ts_add(s2, s1).values()));
        CHECK(values_equal(ts_add(ts_add(s1, s2), s3).values(),
                           ts_add(s1, ts_add(s2, s3)).values()));
        CHECK(values_equal(ts_scale(1, s1).values(), s1.values()));

        // 0*S keeps the null pattern and zeroes the reals.
        auto zeroed = ts_scale(0, s1);
        for (std::size_t i = 0; i < n; ++i) {
            const Value& in = s1.values()[i];
            const Value& out = zeroed.values()[i];
            if (in.is_real()) CHECK(out == R(0));
            else CHECK(out == in);
        }

        // Distributivity, exact for dyadic cells and within 1e-12 anyway.
        auto left = ts_scale(k, ts_add(s1, s2));
        auto right = ts_add(ts_scale(k, s1), ts_scale(k, s2));
        CHECK(values_match(left.values(), right.values(), 1e-12));
    }
}

TEST_CASE("pointwise null precedence is uniform") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 1 + rng() % 20;
        auto a = make_series("A", random_cells(rng, n, 400));
        auto b = make_series("B", random_cells(rng, n, 400));
        std::vector<TimeSeries> results{ts_add(a, b), ts_minus(a, b), ts_mult(a, b),
                                        ts_divide(a, b)};
        for (const TimeSeries& out : results) {
            for (std::size_t i = 0; i < n; ++i) {
                const Value& x = a.values()[i];
                const Value& y = b.values()[i];
                const Value& r = out.values()[i];
                if (x.is_unknown() || y.is_unknown()) CHECK(r.is_unknown());
                else if (x.is_empty() || y.is_empty()) CHECK(r.is_empty());
            }
        }
    }
}

TEST_CASE("operations leave their inputs untouched") {
    auto a = make_series("A", {R(1), E(), R(3)});
    auto b = make_series("B", {R(4), R(5), U()});
    std::vector<Value> a_before(a.values().begin(), a.values().end());
    std::vector<Value> b_before(b.values().begin(), b.values().end());
    (void)ts_add(a, b);
    (void)ts_mult(a, b);
    (void)ts_scale(5, a);
    CHECK(values_equal(a.values(), a_before));
    CHECK(values_equal(b.values(), b_before));
}

TEST_CASE("calendar validation") {
    CHECK_THROWS_AS(Calendar({"2020-01-02", "2020-01-01"}, TimeUnit::Day),
                    CalendarOrderError);
    CHECK_THROWS_AS(Calendar({"2020-01-01", "2020-01-01"}, TimeUnit::Day),
                    CalendarOrderError);
    CHECK_THROWS_AS(Calendar({}, TimeUnit::Day), CalendarOrderError);
    Calendar cal({"2020-01-01", "2020-01-02T00:00:00", "2020-01-02T10:30:00.5"},
                 TimeUnit::Day);
    CHECK(cal.index_of("2020-01-02T00:00:00") == 1);
    CHECK(cal.index_of("2020-03-01") == Calendar::npos);
}

TEST_CASE("series constructor checks its frame") {
    auto cal = cal_of(3);
    CHECK_THROWS_AS(TimeSeries("X", cal, 0, 3, std::vector<Value>(4, R(0))),
                    EngineError);
    CHECK_THROWS_AS(TimeSeries("X", cal, 0, 1, std::vector<Value>(3, R(0))),
                    EngineError);
    CHECK_THROWS_AS(TimeSeries("X", nullptr, 0, 0, {R(0)}), EngineError);
}
