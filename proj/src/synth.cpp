#include "tsms/synth.hpp"

#include <algorithm>
#include <random>

namespace tsms {

TimeSeries make_random_walk(const std::string& name, CalendarPtr calendar,
                            std::uint64_t seed, double start, double step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> delta(-step, step);
    std::vector<Value> values;
    values.reserve(calendar->size());
    double level = start;
    for (std::size_t i = 0; i < calendar->size(); ++i) {
        values.push_back(Value::real(level));
        level = std::max(1.0, level + delta(rng));
    }
    const std::size_t n = values.size();
    return TimeSeries(name, std::move(calendar), 0, n - 1, std::move(values));
}

} // namespace tsms
