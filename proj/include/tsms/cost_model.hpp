#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tsms {

// Analytic model: T_P = A*n/p per peer, T_R = B*p*ln(p) for sequential
// lookups, T_RES = C*n transfer. The gain constants are the normalized
// combination used by the inverse-gain curve.
struct CostParams {
    double A = 0.0; // compute ms per entry
    double B = 0.0; // lookup coefficient ms
    double C = 0.0; // transfer ms per entry

    double k1() const { return B / (A + C); }
    double k2() const { return A / (A + C); }
    double k3() const { return C / (A + C); }
};

// Storage for `stocks` quote histories: years * days * hours at
// values-per-minute samples of bytes-per-value each.
std::uint64_t capacity_bytes(std::uint64_t stocks, std::uint64_t years,
                             std::uint64_t days_per_year, double hours_per_day,
                             std::uint64_t values_per_minute,
                             std::uint64_t bytes_per_value);

// Human-readable "x.y GB" (binary gigabytes) rendering of a byte count.
std::string format_gb(std::uint64_t bytes);

// 1/Gain = K1*(p/n)*ln(p) + K2/p + K3 (natural log; any other base only
// rescales K1 and is absorbed by fitting).
double inverse_gain(std::size_t p, std::size_t n, double k1, double k2, double k3);
double inverse_gain(std::size_t p, std::size_t n, const CostParams& params);

// Integer argmin of inverse_gain over p in [1, p_max]; ties resolve to the
// smaller p.
std::size_t optimal_peers(std::size_t n, const CostParams& params,
                          std::size_t p_max = 4096);

struct CostPrediction {
    double t_index_ms = 0;
    double t_r_ms = 0;
    double t_p_ms = 0;
    double t_q_ms = 0;
    double t_net_ms = 0;
    double t_p2p_ms = 0;
};

CostPrediction predict_tp2p(std::size_t p, std::size_t n, const CostParams& params,
                            double t_q_ms = 0.5);

struct FitRow {
    double p = 0;
    double t_index = 0;
    double t_r = 0;
    double t_p = 0;
};

struct FitResult {
    CostParams params;
    std::vector<double> predicted_t_r;
    std::vector<double> predicted_t_p;
    double max_rel_err_t_r = 0;
    double max_rel_err_t_p = 0;
};

// Least-squares combination of the per-row coefficient estimates
// A_i = t_p*p/n and B_i = t_r/(p*ln p). C comes from the constant transfer
// time t_net of an n-entry result. Throws Underdetermined when fewer than
// two distinct p values are present.
FitResult fit(const std::vector<FitRow>& rows, std::size_t n, double t_net_ms);

// CSV with header p,t_index,t_r,t_p.
std::vector<FitRow> load_fit_csv(const std::string& path);

} // namespace tsms
