// Command-line driver: ingestion, expression evaluation, the four-query
// benchmark, the simulated peer network and the cost-model utilities.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "tsms/cost_model.hpp"
#include "tsms/errors.hpp"
#include "tsms/expr.hpp"
#include "tsms/io.hpp"
#include "tsms/p2p.hpp"
#include "tsms/series_name.hpp"
#include "tsms/synth.hpp"
#include "tsms/transport.hpp"

namespace {

using namespace tsms;

std::string store_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TSMS_STORE")) return env;
    return "store";
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void print_series(const TimeSeries& s, std::ostream& out) {
    out << "date,value\n";
    for (std::size_t i = s.start(); i <= s.end(); ++i) {
        const Value& v = s.at(i);
        if (v.is_empty()) continue;
        out << s.calendar()->label(i) << ",";
        if (v.is_unknown()) out << "?";
        else out << format_number(v.real_value());
        out << "\n";
    }
}

expr::SeriesEnv load_env(const io::Store& store, const expr::ExprNode& tree) {
    expr::SeriesEnv env;
    for (const std::string& name : expr::base_names(tree))
        env.emplace(name, store.load_series(name));
    return env;
}

QueryInterval interval_for(const expr::SeriesEnv& env, long from, long to) {
    std::size_t n = env.begin()->second.length();
    std::size_t start = from < 0 ? 0 : std::size_t(from);
    std::size_t end = to < 0 ? n - 1 : std::size_t(to);
    return {start, end};
}

std::string query_text(const std::string& query, const std::string& name,
                       std::size_t w) {
    if (query == "Q1") return "MAVG(" + name + "," + std::to_string(w) + ")";
    if (query == "Q2") return "RSI(" + name + "," + std::to_string(w) + ")";
    if (query == "Q3")
        return "MINUS(XAVG(" + name + ",3),XAVG(" + name + "," + std::to_string(w) + "))";
    if (query == "Q4") return expr::canonical_name(q4_pke_expr(name));
    throw ParseError("unknown benchmark query: " + query);
}

int run(int argc, char** argv) {
    CLI::App app{"main-memory time series engine with a simulated P2P layer"};
    app.require_subcommand(1);
    std::string store_flag;
    app.add_option("--store", store_flag, "engine store directory (default $TSMS_STORE or ./store)");

    // ingest ---------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "load an XML series or a trip CSV into the store");
    std::string in_format = "xml", in_path, in_name, in_calendar, in_unit = "day";
    double in_dt = 1.0;
    ingest->add_option("--format", in_format, "xml or csv")->check(CLI::IsMember({"xml", "csv"}));
    ingest->add_option("--path", in_path, "input file")->required();
    ingest->add_option("--name", in_name, "series name")->required();
    ingest->add_option("--calendar", in_calendar, "calendar file (one ISO-8601 label per line)");
    ingest->add_option("--unit", in_unit, "calendar unit (second,minute,hour,day,week)");
    ingest->add_option("--dt", in_dt, "trip sampling period in seconds (csv)");

    // export ---------------------------------------------------------------
    auto* exp = app.add_subcommand("export", "write a stored series back to XML");
    std::string ex_name, ex_out;
    exp->add_option("--name", ex_name, "series name")->required();
    exp->add_option("--out", ex_out, "output path (default stdout)");

    // eval -----------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "evaluate a functional expression");
    std::string ev_expr;
    long ev_from = -1, ev_to = -1;
    eval->add_option("--expr", ev_expr, "expression, e.g. MAVG(PX1,10)")->required();
    eval->add_option("--from", ev_from, "first calendar index");
    eval->add_option("--to", ev_to, "last calendar index");

    // bench ----------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "run the Q1-Q4 benchmark grid");
    std::string b_queries = "Q1,Q2,Q3,Q4", b_n = "1000,2000,4000", b_w = "10,50,100";
    std::string b_name;
    int b_repeat = 5;
    std::uint64_t b_seed = 2024;
    bench->add_option("--queries", b_queries, "comma list from Q1,Q2,Q3,Q4");
    bench->add_option("--n", b_n, "comma list of series lengths");
    bench->add_option("--w", b_w, "comma list of window sizes");
    bench->add_option("--repeat", b_repeat, "repetitions per cell")->check(CLI::PositiveNumber);
    bench->add_option("--name", b_name, "benchmark a stored series instead of synthetic data");
    bench->add_option("--seed", b_seed, "seed for the synthetic random walk");

    // p2p ------------------------------------------------------------------
    auto* p2p = app.add_subcommand("p2p", "execute an expression on the simulated network");
    std::string p_expr, p_config, p_trace;
    long p_from = -1, p_to = -1;
    std::size_t p_peers = 8, p_seg = 1024, p_overlap = 128, p_cache = 256;
    std::uint64_t p_seed = 1;
    bool p_parallel = false;
    std::size_t p_n = 0;
    p2p->add_option("--expr", p_expr, "expression to execute")->required();
    p2p->add_option("--from", p_from, "first calendar index");
    p2p->add_option("--to", p_to, "last calendar index");
    p2p->add_option("--peers", p_peers, "number of peers");
    p2p->add_option("--seg-len", p_seg, "segment length in entries");
    p2p->add_option("--overlap", p_overlap, "overlap margin in entries");
    p2p->add_option("--cache", p_cache, "per-peer cache capacity in segments");
    p2p->add_option("--seed", p_seed, "seed for peer selection");
    p2p->add_option("--config", p_config, "JSON simulation config (flags override it)");
    p2p->add_option("--synthetic", p_n, "use a synthetic walk of this length instead of the store");
    p2p->add_flag("--parallel", p_parallel, "evaluate segments concurrently");
    p2p->add_option("--trace", p_trace, "write the event trace to this file");

    // cost -----------------------------------------------------------------
    auto* cost = app.add_subcommand("cost", "cost-model utilities");
    cost->require_subcommand(1);

    auto* cap = cost->add_subcommand("capacity", "storage requirement of a quote archive");
    std::uint64_t c_stocks = 1000, c_years = 10, c_days = 360, c_values = 5, c_bytes = 4;
    double c_hours = 8.5;
    cap->add_option("--stocks", c_stocks);
    cap->add_option("--years", c_years);
    cap->add_option("--days-per-year", c_days);
    cap->add_option("--hours-per-day", c_hours);
    cap->add_option("--values-per-minute", c_values);
    cap->add_option("--bytes-per-value", c_bytes);

    auto* fit_cmd = cost->add_subcommand("fit", "fit A and B to measured rows");
    std::string f_csv;
    std::size_t f_n = 500000;
    double f_tnet = 400.0;
    fit_cmd->add_option("--csv", f_csv, "CSV with header p,t_index,t_r,t_p")->required();
    fit_cmd->add_option("--n", f_n, "series length behind the measurements");
    fit_cmd->add_option("--t-net", f_tnet, "measured transfer time in ms");

    auto* pred = cost->add_subcommand("predict", "predict the timing row for one peer count");
    std::size_t pr_p = 64, pr_n = 500000;
    double pr_a = 0.07, pr_b = 2.0, pr_c = 0.0008, pr_tq = 0.5;
    pred->add_option("--p", pr_p)->required();
    pred->add_option("--n", pr_n);
    pred->add_option("--a", pr_a, "compute ms per entry");
    pred->add_option("--b", pr_b, "lookup coefficient ms");
    pred->add_option("--c", pr_c, "transfer ms per entry");
    pred->add_option("--t-q", pr_tq, "query ship ms");

    auto* grid = cost->add_subcommand("grid", "export the gain surface as CSV");
    std::string g_n = "50000,100000,250000,500000,1000000";
    std::size_t g_pmax = 256;
    double g_a = 0.07, g_b = 2.0, g_c = 0.0008;
    grid->add_option("--n-list", g_n, "comma list of series lengths");
    grid->add_option("--p-max", g_pmax, "largest peer count");
    grid->add_option("--a", g_a);
    grid->add_option("--b", g_b);
    grid->add_option("--c", g_c);

    auto* opt = cost->add_subcommand("optimal", "predicted best peer count for a length");
    std::size_t o_n = 500000, o_pmax = 4096;
    double o_a = 0.07, o_b = 2.0, o_c = 0.0008;
    opt->add_option("--n", o_n)->required();
    opt->add_option("--p-max", o_pmax);
    opt->add_option("--a", o_a);
    opt->add_option("--b", o_b);
    opt->add_option("--c", o_c);

    // trip -----------------------------------------------------------------
    auto* trip_cmd = app.add_subcommand("trip", "eco-driving indicators of a trip CSV");
    std::string t_path, t_unit = "kmh";
    double t_dt = 1.0, t_x = 0.0;
    trip_cmd->add_option("--path", t_path, "trip CSV")->required();
    trip_cmd->add_option("--dt", t_dt, "sampling period in seconds");
    trip_cmd->add_option("--x", t_x, "total trip duration in seconds (default (n-1)*dt)");
    trip_cmd->add_option("--unit", t_unit, "speed unit kmh or mps")
        ->check(CLI::IsMember({"kmh", "mps"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    if (*ingest) {
        io::Store store(store_dir(store_flag));
        if (in_format == "xml") {
            auto rows = io::read_series_xml_file(in_path);
            CalendarPtr cal;
            if (!in_calendar.empty())
                cal = io::read_calendar_file(in_calendar, time_unit_from_string(in_unit));
            else if (store.has_calendar())
                cal = store.calendar();
            else
                cal = io::calendar_from_rows(rows, time_unit_from_string(in_unit));
            if (!store.has_calendar()) store.set_calendar(cal);
            auto s = io::series_from_rows(in_name, rows, store.calendar());
            store.save_series(s);
            std::cout << "ingested " << in_name << " (" << s.length() << " entries)\n";
        } else {
            Trip trip = io::read_trip_csv_file(in_path, in_dt, SpeedUnit::Kmh);
            io::Store trip_store(store_dir(store_flag) + "/" + in_name);
            trip_store.set_calendar(trip.speed.calendar());
            auto save = [&](const char* suffix, const std::optional<TimeSeries>& s) {
                if (!s) return;
                trip_store.save_series(TimeSeries(in_name + std::string("_") + suffix,
                                                  s->calendar(), s->start(), s->end(),
                                                  {s->values().begin(), s->values().end()}));
            };
            trip_store.save_series(TimeSeries(in_name + std::string("_SPEED"),
                                              trip.speed.calendar(), 0,
                                              trip.speed.end(),
                                              {trip.speed.values().begin(),
                                               trip.speed.values().end()}));
            save("ACCEL", trip.accel);
            save("FUEL", trip.fuel);
            save("LEGAL", trip.legal_speed);
            save("LAT", trip.lat);
            save("LON", trip.lon);
            save("ROAD", trip.road);
            std::cout << "ingested trip " << in_name << " (" << trip.speed.length()
                      << " samples)\n";
        }
        return 0;
    }

    if (*exp) {
        io::Store store(store_dir(store_flag));
        auto s = store.load_series(ex_name);
        if (ex_out.empty()) std::cout << io::series_to_xml(s);
        else io::write_series_xml_file(ex_out, s);
        return 0;
    }

    if (*eval) {
        io::Store store(store_dir(store_flag));
        auto tree = expr::parse(ev_expr);
        auto env = load_env(store, *tree);
        auto out = expr::evaluate(tree, env, interval_for(env, ev_from, ev_to));
        print_series(out, std::cout);
        return 0;
    }

    if (*bench) {
        io::Store store(store_dir(store_flag));
        std::vector<std::size_t> lengths, windows;
        for (const auto& tok : split_list(b_n)) lengths.push_back(std::stoull(tok));
        for (const auto& tok : split_list(b_w)) windows.push_back(std::stoull(tok));
        std::string name = b_name.empty() ? "PX1" : b_name;
        std::cout << "query,n,w,repeat,t_ms,t_min_ms,t_max_ms\n";
        for (std::size_t n : lengths) {
            // Data setup is outside the timed section.
            TimeSeries base = [&] {
                if (!b_name.empty()) {
                    auto s = store.load_series(b_name);
                    if (s.length() < n)
                        throw EngineError("stored series shorter than requested n");
                    auto sliced = s.slice(0, n - 1);
                    auto cal = make_synthetic_calendar(n, s.calendar()->unit());
                    return TimeSeries(b_name, cal, 0, n - 1,
                                      {sliced.values().begin(), sliced.values().end()});
                }
                return make_random_walk(name, make_synthetic_calendar(n), b_seed);
            }();
            expr::SeriesEnv env{{name, base}};
            for (const auto& query : split_list(b_queries)) {
                for (std::size_t w : windows) {
                    auto tree = expr::parse(query_text(query, name, w));
                    std::vector<double> times;
                    for (int r = 0; r < b_repeat; ++r) {
                        auto t0 = std::chrono::steady_clock::now();
                        auto result = expr::evaluate(tree, env, {0, n - 1});
                        auto t1 = std::chrono::steady_clock::now();
                        (void)result;
                        times.push_back(
                            std::chrono::duration<double, std::milli>(t1 - t0).count());
                    }
                    double mean = std::accumulate(times.begin(), times.end(), 0.0) /
                                  double(times.size());
                    double mn = *std::min_element(times.begin(), times.end());
                    double mx = *std::max_element(times.begin(), times.end());
                    std::printf("%s,%zu,%zu,%d,%.4f,%.4f,%.4f\n", query.c_str(), n, w,
                                b_repeat, mean, mn, mx);
                    if (query == "Q4") break; // no window parameter in its expression
                }
            }
        }
        return 0;
    }

    if (*p2p) {
        p2p::SimConfig cfg;
        if (!p_config.empty()) cfg = p2p::SimConfig::from_json_file(p_config);
        if (p2p->count("--peers") || p_config.empty()) cfg.peers = p_peers;
        if (p2p->count("--seg-len") || p_config.empty()) cfg.segment.seg_len = p_seg;
        if (p2p->count("--overlap") || p_config.empty()) cfg.segment.overlap = p_overlap;
        if (p2p->count("--cache") || p_config.empty()) cfg.cache_capacity = p_cache;
        if (p2p->count("--parallel")) cfg.parallel = true;
        if (!p_trace.empty()) cfg.record_trace = true;
        cfg.seed = p_seed;

        auto tree = expr::parse(p_expr);
        expr::SeriesEnv env;
        if (p_n > 0) {
            auto cal = make_synthetic_calendar(p_n);
            for (const std::string& nm : expr::base_names(*tree))
                env.emplace(nm, make_random_walk(nm, cal, 2024 + env.size()));
        } else {
            io::Store store(store_dir(store_flag));
            env = load_env(store, *tree);
        }
        p2p::Network net(cfg, env.begin()->second.calendar());
        for (const auto& [nm, series] : env) net.load_base(series);
        auto interval = interval_for(env, p_from, p_to);
        auto result = net.execute(tree, interval, p_seed);
        print_series(result.series, std::cout);

        const auto& probe = result.probe;
        std::fprintf(stderr, "P,T_INDEX,T_R,T_P,T_Q,T_NET,T_P2P\n");
        std::fprintf(stderr, "%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n", cfg.peers,
                     probe.t_index_ms(), probe.t_r_ms(), probe.t_p_ms(), probe.t_q_ms(),
                     probe.t_net_ms(), probe.t_p2p_ms());
        std::fprintf(stderr, "lookups=%zu ops=%llu cells_shipped=%zu wall_ms=%.3f\n",
                     probe.lookup_count,
                     static_cast<unsigned long long>(result.ops_executed),
                     result.cells_shipped, result.wall_ms);
        if (!p_trace.empty()) {
            std::ofstream out(p_trace);
            for (const auto& line : net.trace()) out << line << "\n";
        }
        return 0;
    }

    if (*cap) {
        std::uint64_t bytes =
            capacity_bytes(c_stocks, c_years, c_days, c_hours, c_values, c_bytes);
        std::cout << bytes << " bytes \xE2\x89\x88 " << format_gb(bytes) << "\n";
        return 0;
    }

    if (*fit_cmd) {
        auto rows = load_fit_csv(f_csv);
        FitResult res = fit(rows, f_n, f_tnet);
        std::printf("A=%.6f B=%.6f C=%.6f K1=%.4f K2=%.4f K3=%.4f\n", res.params.A,
                    res.params.B, res.params.C, res.params.k1(), res.params.k2(),
                    res.params.k3());
        std::printf("p,t_r,t_r_pred,t_p,t_p_pred\n");
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::printf("%g,%g,%.1f,%g,%.1f\n", rows[i].p, rows[i].t_r,
                        res.predicted_t_r[i], rows[i].t_p, res.predicted_t_p[i]);
        std::printf("max_rel_err_t_r=%.3f max_rel_err_t_p=%.3f\n", res.max_rel_err_t_r,
                    res.max_rel_err_t_p);
        return 0;
    }

    if (*pred) {
        CostParams params{pr_a, pr_b, pr_c};
        auto row = predict_tp2p(pr_p, pr_n, params, pr_tq);
        std::printf("P,T_INDEX,T_R,T_P,T_Q,T_NET,T_P2P\n");
        std::printf("%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n", pr_p, row.t_index_ms,
                    row.t_r_ms, row.t_p_ms, row.t_q_ms, row.t_net_ms, row.t_p2p_ms);
        return 0;
    }

    if (*grid) {
        CostParams params{g_a, g_b, g_c};
        std::cout << "p,n,gain\n";
        for (const auto& tok : split_list(g_n)) {
            std::size_t n = std::stoull(tok);
            for (std::size_t p = 1; p <= g_pmax; ++p)
                std::printf("%zu,%zu,%.6f\n", p, n, 1.0 / inverse_gain(p, n, params));
        }
        return 0;
    }

    if (*opt) {
        CostParams params{o_a, o_b, o_c};
        std::cout << optimal_peers(o_n, params, o_pmax) << "\n";
        return 0;
    }

    if (*trip_cmd) {
        Trip trip = io::read_trip_csv_file(
            t_path, t_dt, t_unit == "kmh" ? SpeedUnit::Kmh : SpeedUnit::Mps);
        trip.x = t_x;
        std::printf("rpa,%.6f\n", rpa(trip));
        std::printf("pke,%.6f\n", pke(trip));
        std::printf("pst,%.6f\n", pst(trip));
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tsms::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const tsms::EngineError& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
