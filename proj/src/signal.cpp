#include "tls/signal.hpp"

#include <algorithm>
#include <numeric>

namespace tls {

char color_char(ManeuverColor c) {
    switch (c) {
        case ManeuverColor::Green: return 'G';
        case ManeuverColor::Yellow: return 'y';
        case ManeuverColor::FlashingYellow: return 'g';
        case ManeuverColor::Red: return 'r';
    }
    return '?';
}

ManeuverColor color_from_char(char c) {
    switch (c) {
        case 'G': return ManeuverColor::Green;
        case 'y': return ManeuverColor::Yellow;
        case 'g': return ManeuverColor::FlashingYellow;
        case 'r': return ManeuverColor::Red;
    }
    throw ConfigError(std::string("unknown color symbol: ") + c);
}

std::string colors_to_string(const std::vector<ManeuverColor>& colors) {
    std::string s;
    s.reserve(colors.size());
    for (auto c : colors) s.push_back(color_char(c));
    return s;
}

std::vector<ManeuverColor> colors_from_string(const std::string& s) {
    std::vector<ManeuverColor> v;
    v.reserve(s.size());
    for (char c : s) v.push_back(color_from_char(c));
    return v;
}

void validate_plan(const SemaphorePlan& plan) {
    if (plan.phases.size() < 2)
        throw ConfigError("plan needs at least 2 phases: " + plan.junction);
    const std::size_t width = plan.phases.front().colors.size();
    if (width == 0) throw ConfigError("plan has no maneuvers: " + plan.junction);
    for (const auto& ph : plan.phases) {
        if (ph.duration < 1) throw ConfigError("phase duration < 1: " + plan.junction);
        if (ph.colors.size() != width)
            throw ConfigError("inconsistent maneuver count: " + plan.junction);
        if (ph.variable) {
            if (ph.duration < kMinVariableDuration || ph.duration > kMaxVariableDuration ||
                ph.duration % kDurationGranularity != 0)
                throw ConfigError("variable duration outside {20,25,...,60}: " +
                                  plan.junction);
        }
    }
    bool any_green = false;
    for (std::size_t m = 0; m < width; ++m) {
        bool all_green = true;
        for (const auto& ph : plan.phases) {
            if (ph.colors[m] == ManeuverColor::Green) any_green = true;
            else all_green = false;
        }
        if (all_green)
            throw ConfigError("maneuver green in every phase: " + plan.junction);
    }
    if (!any_green) throw ConfigError("no green maneuver in any phase: " + plan.junction);
}

int cycle_length(const SemaphorePlan& plan) {
    return std::accumulate(plan.phases.begin(), plan.phases.end(), 0,
                           [](int acc, const Phase& p) { return acc + p.duration; });
}

std::size_t current_phase(const SemaphorePlan& plan, int time_in_cycle) {
    if (time_in_cycle < 0 || time_in_cycle >= cycle_length(plan))
        throw ContractError("time_in_cycle out of range");
    int start = 0;
    for (std::size_t i = 0; i < plan.phases.size(); ++i) {
        start += plan.phases[i].duration;
        if (time_in_cycle < start) return i;
    }
    throw ContractError("unreachable");  // cycle_length bound excludes this
}

std::vector<std::size_t> variable_phase_indices(const SemaphorePlan& plan) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < plan.phases.size(); ++i)
        if (plan.phases[i].variable) idx.push_back(i);
    return idx;
}

std::vector<int> variable_durations(const SemaphorePlan& plan) {
    std::vector<int> d;
    for (const auto& ph : plan.phases)
        if (ph.variable) d.push_back(ph.duration);
    return d;
}

SemaphorePlan apply_deltas(const SemaphorePlan& plan, const std::vector<int>& deltas) {
    auto idx = variable_phase_indices(plan);
    if (deltas.size() != idx.size())
        throw ContractError("delta count != variable phase count");
    SemaphorePlan out = plan;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const int d = deltas[k];
        if (d != -5 && d != 0 && d != 5)
            throw ContractError("delta must be -5, 0 or +5");
        const int nd = out.phases[idx[k]].duration + d;
        if (nd < kMinVariableDuration || nd > kMaxVariableDuration)
            throw IllegalActionError("duration would leave [20, 60]");
        out.phases[idx[k]].duration = nd;
    }
    validate_plan(out);
    return out;
}

SemaphorePlan with_variable_durations(const SemaphorePlan& plan,
                                      const std::vector<int>& durations) {
    auto idx = variable_phase_indices(plan);
    if (durations.size() != idx.size())
        throw ConfigError("duration count != variable phase count");
    SemaphorePlan out = plan;
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.phases[idx[k]].duration = durations[k];
    validate_plan(out);
    return out;
}

const SemaphorePlan& plan_for_period(const DayPeriodPlanSet& set, DayPeriod period) {
    auto it = set.find(period);
    if (it == set.end())
        throw ConfigError("no plan for period " + to_string(period));
    return it->second;
}

namespace {

// Maneuver m corresponds to incoming link m (links sorted by id); true when
// the approach runs north-south.
std::vector<bool> vertical_approaches(const RoadNetwork& net, const std::string& junction) {
    const Junction& j = net.junction(junction);
    std::vector<bool> vert;
    for (const auto& lid : net.incoming(junction)) {
        const Junction& from = net.junction(net.link(lid).from);
        vert.push_back(from.col == j.col);
    }
    if (vert.empty()) throw ConfigError("junction has no incoming links: " + junction);
    return vert;
}

std::vector<ManeuverColor> split_colors(const std::vector<bool>& vert, ManeuverColor ns,
                                        ManeuverColor ew) {
    std::vector<ManeuverColor> c;
    c.reserve(vert.size());
    for (bool v : vert) c.push_back(v ? ns : ew);
    return c;
}

}  // namespace

SemaphorePlan default_two_green_plan(const RoadNetwork& net, const std::string& junction,
                                     int ns_green, int ew_green) {
    auto vert = vertical_approaches(net, junction);
    using C = ManeuverColor;
    SemaphorePlan plan;
    plan.junction = junction;
    plan.phases = {
        {ns_green, split_colors(vert, C::Green, C::Red), true},
        {5, split_colors(vert, C::Yellow, C::Red), false},
        {ew_green, split_colors(vert, C::Red, C::Green), true},
        {5, split_colors(vert, C::Red, C::Yellow), false},
    };
    validate_plan(plan);
    return plan;
}

SemaphorePlan six_phase_plan(const RoadNetwork& net, const std::string& junction,
                             int g1, int g2, int g3) {
    auto vert = vertical_approaches(net, junction);
    using C = ManeuverColor;
    std::vector<ManeuverColor> all_flash(vert.size(), C::FlashingYellow);
    std::vector<ManeuverColor> all_red(vert.size(), C::Red);
    SemaphorePlan plan;
    plan.junction = junction;
    plan.phases = {
        {g1, split_colors(vert, C::Green, C::Red), true},
        {5, split_colors(vert, C::Yellow, C::Red), false},
        {g2, split_colors(vert, C::Red, C::Green), true},
        {5, split_colors(vert, C::Red, C::Yellow), false},
        {g3, all_flash, true},
        {10, all_red, false},
    };
    validate_plan(plan);
    return plan;
}

}  // namespace tls
