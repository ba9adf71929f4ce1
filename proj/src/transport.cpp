#include "tsms/transport.hpp"

#include <cmath>

#include "tsms/errors.hpp"

namespace tsms {

namespace {

constexpr double kKmhToMps = 1.0 / 3.6;

double to_mps(double v, SpeedUnit unit) {
    return unit == SpeedUnit::Kmh ? v * kKmhToMps : v;
}

double to_kmh(double v, SpeedUnit unit) {
    return unit == SpeedUnit::Kmh ? v : v * 3.6;
}

// Acceleration feeding step t (from sample t-1 to t), in m/s^2: the
// supplied accel series takes precedence, otherwise a backward difference
// of the speed. Unset optional when either input cell is null.
std::optional<double> step_accel(const Trip& trip, std::size_t t) {
    if (trip.accel) {
        const Value& a = trip.accel->values()[t];
        if (!a.is_real()) return std::nullopt;
        return a.real_value();
    }
    const Value& v1 = trip.speed.values()[t];
    const Value& v0 = trip.speed.values()[t - 1];
    if (!v1.is_real() || !v0.is_real()) return std::nullopt;
    return (to_mps(v1.real_value(), trip.speed_unit) -
            to_mps(v0.real_value(), trip.speed_unit)) /
           trip.dt;
}

void require_speed(const Trip& trip) {
    if (trip.speed.length() < 2) throw TooShort("trip needs at least two speed samples");
    if (trip.dt <= 0) throw EngineError("trip sampling period must be positive");
}

} // namespace

double rpa(const Trip& trip) {
    require_speed(trip);
    const auto speed = trip.speed.values();
    const double x = trip.duration();
    double acc = 0.0;
    for (std::size_t t = 1; t < speed.size(); ++t) {
        auto a = step_accel(trip, t);
        if (!a || *a <= 0.0) continue;
        if (!speed[t].is_real()) continue;
        acc += to_mps(speed[t].real_value(), trip.speed_unit) * *a * trip.dt;
    }
    return acc / x;
}

double pke(const Trip& trip) {
    require_speed(trip);
    const auto speed = trip.speed.values();
    const double x = trip.duration();
    double acc = 0.0;
    bool in_run = false;
    double run_start_speed = 0.0; // m/s, speed just before the run began
    double run_final_speed = 0.0;
    auto close_run = [&]() {
        if (in_run)
            acc += run_final_speed * run_final_speed - run_start_speed * run_start_speed;
        in_run = false;
    };
    for (std::size_t t = 1; t < speed.size(); ++t) {
        auto a = step_accel(trip, t);
        // Null samples break runs: no kinetic energy is invented across gaps.
        if (!a || !speed[t].is_real() || !speed[t - 1].is_real()) {
            close_run();
            continue;
        }
        if (*a > 0.0) {
            if (!in_run) {
                in_run = true;
                run_start_speed = to_mps(speed[t - 1].real_value(), trip.speed_unit);
            }
            run_final_speed = to_mps(speed[t].real_value(), trip.speed_unit);
        } else {
            close_run();
        }
    }
    close_run();
    return acc / x;
}

double pst(const Trip& trip) {
    const auto speed = trip.speed.values();
    std::size_t real_count = 0, standstill = 0;
    for (const Value& v : speed) {
        if (!v.is_real()) continue;
        ++real_count;
        if (to_kmh(v.real_value(), trip.speed_unit) < 2.0) ++standstill;
    }
    if (real_count == 0) throw NoData("trip has no real speed samples");
    return double(standstill) / double(real_count);
}

expr::ExprPtr q4_pke_expr(const std::string& name) {
    const std::string gate = "SEL(MOM(" + name + ",2),>0)";
    const std::string vf = "MULT(" + name + "," + gate + ")";
    const std::string vs = "MULT(SHIFT(" + name + ")," + gate + ")";
    return expr::parse("MINUS(MULT(" + vf + "," + vf + "),MULT(" + vs + "," + vs + "))");
}

} // namespace tsms
