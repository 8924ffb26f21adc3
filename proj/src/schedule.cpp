#include "tls/schedule.hpp"

#include <cmath>

namespace tls {

std::string to_string(DayPeriod p) {
    switch (p) {
        case DayPeriod::Low: return "Low";
        case DayPeriod::Medium: return "Medium";
        case DayPeriod::High: return "High";
    }
    return "?";
}

DayPeriod day_period_from_string(const std::string& s) {
    if (s == "Low") return DayPeriod::Low;
    if (s == "Medium") return DayPeriod::Medium;
    if (s == "High") return DayPeriod::High;
    throw ConfigError("unknown day period: " + s);
}

TrafficSchedule default_schedule() {
    return {{{0.0, DayPeriod::Low},
             {7.5, DayPeriod::High},
             {9.0, DayPeriod::Medium},
             {18.0, DayPeriod::High},
             {20.0, DayPeriod::Low}}};
}

void validate_schedule(const TrafficSchedule& s) {
    if (s.entries.empty()) throw ConfigError("empty schedule");
    if (s.entries.front().start_hour != 0.0)
        throw ConfigError("schedule must start at hour 0");
    for (std::size_t i = 1; i < s.entries.size(); ++i)
        if (s.entries[i].start_hour <= s.entries[i - 1].start_hour)
            throw ConfigError("schedule start hours must strictly increase");
    if (s.entries.back().start_hour >= 24.0)
        throw ConfigError("schedule start hours must be < 24");
}

DayPeriod level_at(const TrafficSchedule& s, long long step, long long steps_per_hour) {
    validate_schedule(s);
    if (step < 0) throw ContractError("negative step");
    const long long day_steps = 24 * steps_per_hour;
    const long long pos = step % day_steps;
    DayPeriod level = s.entries.front().level;
    for (const auto& e : s.entries) {
        const long long start = std::llround(e.start_hour * static_cast<double>(steps_per_hour));
        if (pos >= start) level = e.level;
    }
    return level;
}

}  // namespace tls
