#ifndef TLS_SIGNAL_HPP
#define TLS_SIGNAL_HPP

#include <map>
#include <string>
#include <vector>

#include "tls/errors.hpp"
#include "tls/network.hpp"
#include "tls/schedule.hpp"

namespace tls {

// Rendered externally as "G", "y", "g", "r".
enum class ManeuverColor { Green, Yellow, FlashingYellow, Red };

char color_char(ManeuverColor c);
ManeuverColor color_from_char(char c);
std::string colors_to_string(const std::vector<ManeuverColor>& colors);
std::vector<ManeuverColor> colors_from_string(const std::string& s);

constexpr int kMinVariableDuration = 20;
constexpr int kMaxVariableDuration = 60;
constexpr int kDurationGranularity = 5;

struct Phase {
    int duration = 0;  // seconds; 1 second == 1 engine step
    std::vector<ManeuverColor> colors;
    bool variable = false;
};

struct SemaphorePlan {
    std::string junction;
    std::vector<Phase> phases;
};

// Throws ConfigError on any invariant violation: < 2 phases, mismatched color
// widths, variable durations outside {20,25,...,60}, a maneuver green in all
// phases, or no green anywhere.
void validate_plan(const SemaphorePlan& plan);

int cycle_length(const SemaphorePlan& plan);

// Index of the phase whose [start, start+duration) interval contains t.
std::size_t current_phase(const SemaphorePlan& plan, int time_in_cycle);

std::vector<std::size_t> variable_phase_indices(const SemaphorePlan& plan);
std::vector<int> variable_durations(const SemaphorePlan& plan);

// One delta in {-5, 0, +5} per variable phase, in phase order. Throws
// IllegalActionError if a result would leave [20, 60].
SemaphorePlan apply_deltas(const SemaphorePlan& plan, const std::vector<int>& deltas);

// Replace variable-phase durations wholesale (validated).
SemaphorePlan with_variable_durations(const SemaphorePlan& plan,
                                      const std::vector<int>& durations);

using DayPeriodPlanSet = std::map<DayPeriod, SemaphorePlan>;

const SemaphorePlan& plan_for_period(const DayPeriodPlanSet& set, DayPeriod period);

// Default 4-phase plan for a grid junction: green for north/south approaches
// (variable), yellow, green for east/west (variable), yellow. One maneuver per
// incoming link, ordered by link id.
SemaphorePlan default_two_green_plan(const RoadNetwork& net, const std::string& junction,
                                     int ns_green = 30, int ew_green = 30);

// 6-phase template with three variable phases; defaults sum to an 80 s cycle.
SemaphorePlan six_phase_plan(const RoadNetwork& net, const std::string& junction,
                             int g1 = 20, int g2 = 20, int g3 = 20);

}  // namespace tls

#endif
