#ifndef TLS_SCHEDULE_HPP
#define TLS_SCHEDULE_HPP

#include <string>
#include <vector>

#include "tls/errors.hpp"

namespace tls {

enum class DayPeriod { Low, Medium, High };

std::string to_string(DayPeriod p);
DayPeriod day_period_from_string(const std::string& s);

// Daily traffic-level schedule. Each entry opens a half-open band lasting
// until the next entry; the last band wraps at midnight.
struct ScheduleEntry {
    double start_hour = 0.0;  // theoretical hour, e.g. 7.5 for 07h30
    DayPeriod level = DayPeriod::Low;
};

struct TrafficSchedule {
    std::vector<ScheduleEntry> entries;
};

// 00h00 Low, 07h30 High, 09h00 Medium, 18h00 High, 20h00 Low.
TrafficSchedule default_schedule();

void validate_schedule(const TrafficSchedule& s);

DayPeriod level_at(const TrafficSchedule& s, long long step, long long steps_per_hour);

}  // namespace tls

#endif
