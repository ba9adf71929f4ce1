#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>

#include "tsms/cost_model.hpp"
#include "tsms/errors.hpp"

using namespace tsms;

namespace {

// The measured lookup/compute rows the model is fitted against.
const std::vector<FitRow> kMeasuredRows = {
    {8, 7.1, 56.8, 4473},    {16, 6.3, 100.8, 2176}, {32, 7.4, 236.8, 1106},
    {64, 8.4, 537.6, 580},   {128, 8.9, 1139.2, 286}, {256, 9.7, 2483.2, 140},
};
constexpr std::size_t kRowN = 500000;
constexpr double kRowTnet = 400.0;

// Scan argmin oracle over integer p.
std::size_t argmin_inverse_gain(std::size_t n, const CostParams& params,
                                std::size_t p_max) {
    std::size_t best = 1;
    for (std::size_t p = 1; p <= p_max; ++p)
        if (inverse_gain(p, n, params) < inverse_gain(best, n, params)) best = p;
    return best;
}

} // namespace

TEST_CASE("storage capacity") {
    CHECK(capacity_bytes(1000, 10, 360, 8.5, 5, 4) == 36720000000ull);
    CHECK(format_gb(36720000000ull) == "34.2 GB");
    CHECK(capacity_bytes(0, 10, 360, 8.5, 5, 4) == 0);
    CHECK(capacity_bytes(1, 1, 1, 1.0 / 60.0, 1, 1) == 1);
}

TEST_CASE("inverse gain basics") {
    CostParams unit{1, 1, 1};
    CHECK(inverse_gain(1, 1000, unit) ==
          doctest::Approx(unit.k2() + unit.k3()).epsilon(1e-12));

    // K1=K2=K3=1 needs A=C and B=A+C; params A=1,B=2,C=1 give exactly that.
    CostParams ones{1, 2, 1};
    CHECK(ones.k1() == doctest::Approx(1.0));
    CHECK(ones.k2() == doctest::Approx(0.5));
    CHECK(ones.k3() == doctest::Approx(0.5));
}

TEST_CASE("unit-constant gain curve bottoms out near p=16 for n=1000") {
    // Scan oracle over integer p with free constants K1=K2=K3=1.
    std::size_t best = 1;
    for (std::size_t p = 1; p <= 4096; ++p)
        if (inverse_gain(p, 1000, 1, 1, 1) < inverse_gain(best, 1000, 1, 1, 1))
            best = p;
    CHECK(best == 16);

    // optimal_peers agrees with the scan oracle on derived constants too.
    CostParams params{1, 2, 1};
    CHECK(optimal_peers(1000, params) == argmin_inverse_gain(1000, params, 4096));
}

TEST_CASE("gain curve has a single interior minimum") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> coef(0.1, 10.0);
    for (int iter = 0; iter < 100; ++iter) {
        CostParams params{coef(rng), coef(rng), coef(rng)};
        const std::size_t n = 1000000;
        int sign_changes = 0;
        double prev = inverse_gain(2, n, params) - inverse_gain(1, n, params);
        for (std::size_t p = 2; p < 4096; ++p) {
            double diff = inverse_gain(p + 1, n, params) - inverse_gain(p, n, params);
            if (prev < 0 && diff >= 0) ++sign_changes;
            if (diff != 0) prev = diff;
        }
        CHECK(sign_changes == 1);
    }
}

TEST_CASE("optimal peers is monotone in series length") {
    CostParams params = fit(kMeasuredRows, kRowN, kRowTnet).params;
    std::size_t prev = 1;
    for (std::size_t n : {1000u, 10000u, 100000u, 500000u, 2000000u}) {
        std::size_t best = optimal_peers(n, params, 2048);
        CHECK(best >= prev);
        prev = best;
    }
}

TEST_CASE("pure parallelism pushes the optimum to the cap") {
    CostParams params{1.0, 0.0, 1.0}; // K1 = 0
    CHECK(optimal_peers(1000, params, 512) == 512);
}

TEST_CASE("fitting the measured rows") {
    FitResult res = fit(kMeasuredRows, kRowN, kRowTnet);
    // Per-entry compute cost close to the centralized 34106ms / 500000.
    CHECK(res.params.A == doctest::Approx(0.07).epsilon(0.1));
    // Every row's lookup prediction lands within 35%.
    CHECK(res.max_rel_err_t_r < 0.35);
    CHECK(res.params.C == doctest::Approx(kRowTnet / double(kRowN)).epsilon(1e-12));

    // The fitted model localizes the best peer count where the measured
    // T_P2P bottomed out.
    std::size_t best_total = 1;
    auto total = [&](std::size_t p) {
        return predict_tp2p(p, kRowN, res.params).t_p2p_ms;
    };
    for (std::size_t p = 1; p <= 4096; ++p)
        if (total(p) < total(best_total)) best_total = p;
    CHECK(best_total > 32);
    CHECK(best_total < 128);

    std::size_t best_gain = optimal_peers(kRowN, res.params);
    CHECK(best_gain >= 50);
    CHECK(best_gain <= 200);
}

TEST_CASE("fit recovers exact synthetic coefficients") {
    const double a = 0.05, b = 1.7;
    std::vector<FitRow> rows;
    for (double p : {4.0, 8.0, 32.0, 64.0}) {
        FitRow r;
        r.p = p;
        r.t_r = b * p * std::log(p);
        r.t_index = r.t_r / p;
        r.t_p = a * 100000.0 / p;
        rows.push_back(r);
    }
    FitResult res = fit(rows, 100000, 80.0);
    CHECK(res.params.A == doctest::Approx(a).epsilon(1e-9));
    CHECK(res.params.B == doctest::Approx(b).epsilon(1e-9));
    CHECK(res.max_rel_err_t_r < 1e-9);
    CHECK(res.max_rel_err_t_p < 1e-9);
}

TEST_CASE("fit needs at least two distinct peer counts") {
    CHECK_THROWS_AS(fit({{8, 7.1, 56.8, 4473}}, kRowN, kRowTnet), Underdetermined);
    CHECK_THROWS_AS(fit({{8, 7.1, 56.8, 4473}, {8, 7.1, 56.8, 4473}}, kRowN, kRowTnet),
                    Underdetermined);
}

TEST_CASE("prediction arithmetic") {
    // Per-entry cost taken from a centralized 34106ms run over 500000
    // entries; the distributed measurement at P=64 was 580ms.
    CostParams params{34106.0 / 500000.0, 2.0, 0.0008};
    auto pred = predict_tp2p(64, 500000, params);
    CHECK(pred.t_p_ms == doctest::Approx(533.0).epsilon(0.01));
    CHECK(std::fabs(pred.t_p_ms - 580.0) / 580.0 < 0.15);

    auto single = predict_tp2p(1, 500000, params);
    CHECK(single.t_p_ms == doctest::Approx(params.A * 500000).epsilon(1e-12));
    CHECK(single.t_r_ms == doctest::Approx(0.0));

    auto n1 = predict_tp2p(16, 100000, params);
    auto n2 = predict_tp2p(16, 200000, params);
    CHECK(n2.t_p_ms == doctest::Approx(2 * n1.t_p_ms).epsilon(1e-12));
    CHECK(n2.t_net_ms == doctest::Approx(2 * n1.t_net_ms).epsilon(1e-12));
    CHECK(n2.t_r_ms == doctest::Approx(n1.t_r_ms).epsilon(1e-12));
    CHECK(n1.t_p2p_ms ==
          doctest::Approx(n1.t_r_ms + n1.t_p_ms + n1.t_q_ms + n1.t_net_ms)
              .epsilon(1e-12));
}

TEST_CASE("fit CSV loader") {
    const char* path = "fit_roundtrip_test.csv";
    {
        std::ofstream out(path);
        out << "p,t_index,t_r,t_p\n";
        for (const FitRow& r : kMeasuredRows)
            out << r.p << "," << r.t_index << "," << r.t_r << "," << r.t_p << "\n";
    }
    auto rows = load_fit_csv(path);
    REQUIRE(rows.size() == kMeasuredRows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].p == kMeasuredRows[i].p);
        CHECK(rows[i].t_r == kMeasuredRows[i].t_r);
    }
    std::remove(path);

    {
        std::ofstream out(path);
        out << "wrong,header\n";
    }
    CHECK_THROWS_AS(load_fit_csv(path), ParseError);
    std::remove(path);
}
