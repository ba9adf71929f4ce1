#pragma once

#include <optional>

#include "tsms/expr.hpp"
#include "tsms/time_series.hpp"

namespace tsms {

enum class SpeedUnit : std::uint8_t { Kmh, Mps };

// One instrumented trip: sampled speed plus optional companion series, all
// on one calendar at a fixed sampling period dt (seconds).
struct Trip {
    TimeSeries speed;
    std::optional<TimeSeries> accel = std::nullopt; // m/s^2; derived when absent
    std::optional<TimeSeries> fuel = std::nullopt;
    std::optional<TimeSeries> legal_speed = std::nullopt;
    std::optional<TimeSeries> lat = std::nullopt;
    std::optional<TimeSeries> lon = std::nullopt;
    std::optional<TimeSeries> road = std::nullopt;
    double dt = 1.0;
    double x = 0.0; // total duration in seconds; 0 means (n-1)*dt
    SpeedUnit speed_unit = SpeedUnit::Kmh;

    double duration() const {
        return x > 0.0 ? x : double(speed.length() - 1) * dt;
    }
};

// Relative positive acceleration (1/x) * sum over a>0 of v*a*dt, speeds in
// m/s. Null speed samples are skipped. Throws TooShort when n < 2.
double rpa(const Trip& trip);

// Positive kinetic energy: sum over maximal positive-acceleration runs of
// (v_final^2 - v_start^2), divided by x; null samples break runs.
double pke(const Trip& trip);

// Proportion of standstill time: fraction of real samples with speed
// below 2 km/h. Throws NoData when the series has no real samples.
double pst(const Trip& trip);

// The stock-market rendition of PKE applied to a quote series: the full
// functional expression over MULT/SHIFT/SEL/MOM, parameterized by the base
// series name.
expr::ExprPtr q4_pke_expr(const std::string& name);

} // namespace tsms
