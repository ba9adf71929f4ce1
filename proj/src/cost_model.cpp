#include "tsms/cost_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tsms/errors.hpp"

namespace tsms {

std::uint64_t capacity_bytes(std::uint64_t stocks, std::uint64_t years,
                             std::uint64_t days_per_year, double hours_per_day,
                             std::uint64_t values_per_minute,
                             std::uint64_t bytes_per_value) {
    double product = double(stocks) * double(years) * double(days_per_year) * 60.0 *
                     hours_per_day * double(values_per_minute) * double(bytes_per_value);
    return static_cast<std::uint64_t>(std::llround(product));
}

std::string format_gb(std::uint64_t bytes) {
    double gb = double(bytes) / double(1ull << 30);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f GB", gb);
    return buf;
}

double inverse_gain(std::size_t p, std::size_t n, double k1, double k2, double k3) {
    double pd = double(p);
    return k1 * (pd / double(n)) * std::log(pd) + k2 / pd + k3;
}

double inverse_gain(std::size_t p, std::size_t n, const CostParams& params) {
    return inverse_gain(p, n, params.k1(), params.k2(), params.k3());
}

std::size_t optimal_peers(std::size_t n, const CostParams& params, std::size_t p_max) {
    std::size_t best = 1;
    double best_val = inverse_gain(1, n, params);
    for (std::size_t p = 2; p <= p_max; ++p) {
        double v = inverse_gain(p, n, params);
        if (v < best_val) {
            best_val = v;
            best = p;
        }
    }
    return best;
}

CostPrediction predict_tp2p(std::size_t p, std::size_t n, const CostParams& params,
                            double t_q_ms) {
    CostPrediction out;
    double pd = double(p);
    out.t_r_ms = params.B * pd * std::log(pd);
    out.t_index_ms = p > 0 ? out.t_r_ms / pd : 0.0;
    out.t_p_ms = params.A * double(n) / pd;
    out.t_q_ms = t_q_ms;
    out.t_net_ms = params.C * double(n);
    out.t_p2p_ms = out.t_r_ms + out.t_p_ms + out.t_q_ms + out.t_net_ms;
    return out;
}

FitResult fit(const std::vector<FitRow>& rows, std::size_t n, double t_net_ms) {
    std::set<double> distinct;
    for (const FitRow& r : rows) distinct.insert(r.p);
    if (distinct.size() < 2)
        throw Underdetermined("fit needs at least two distinct peer counts");

    // Per-row coefficient estimates, combined by least squares (their mean).
    double a_sum = 0, b_sum = 0;
    std::size_t b_count = 0;
    for (const FitRow& r : rows) {
        a_sum += r.t_p * r.p / double(n);
        if (r.p > 1) {
            b_sum += r.t_r / (r.p * std::log(r.p));
            ++b_count;
        }
    }
    if (b_count < 2) throw Underdetermined("fit needs lookup rows with p > 1");

    FitResult out;
    out.params.A = a_sum / double(rows.size());
    out.params.B = b_sum / double(b_count);
    out.params.C = t_net_ms / double(n);
    for (const FitRow& r : rows) {
        double pred_tr = out.params.B * r.p * std::log(r.p);
        double pred_tp = out.params.A * double(n) / r.p;
        out.predicted_t_r.push_back(pred_tr);
        out.predicted_t_p.push_back(pred_tp);
        if (r.t_r > 0)
            out.max_rel_err_t_r =
                std::max(out.max_rel_err_t_r, std::fabs(pred_tr - r.t_r) / r.t_r);
        if (r.t_p > 0)
            out.max_rel_err_t_p =
                std::max(out.max_rel_err_t_p, std::fabs(pred_tp - r.t_p) / r.t_p);
    }
    return out;
}

std::vector<FitRow> load_fit_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fit CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty fit CSV: " + path);
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "p,t_index,t_r,t_p")
        throw ParseError("fit CSV must start with header p,t_index,t_r,t_p");
    std::vector<FitRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        FitRow r;
        char c1, c2, c3;
        if (!(ss >> r.p >> c1 >> r.t_index >> c2 >> r.t_r >> c3 >> r.t_p) || c1 != ',' ||
            c2 != ',' || c3 != ',')
            throw ParseError("bad fit CSV row at line " + std::to_string(lineno));
        rows.push_back(r);
    }
    return rows;
}

} // namespace tsms
