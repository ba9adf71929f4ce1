#pragma once

#include <cstdint>

#include "tsms/time_series.hpp"

namespace tsms {

// Seeded random-walk quote series: starts at `start`, steps uniform in
// [-step, step], floored at 1 so values stay positive.
TimeSeries make_random_walk(const std::string& name, CalendarPtr calendar,
                            std::uint64_t seed, double start = 100.0,
                            double step = 1.0);

} // namespace tsms
