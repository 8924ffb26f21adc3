#ifndef TLS_SCENARIO_HPP
#define TLS_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tls/agents.hpp"
#include "tls/metrics.hpp"
#include "tls/network.hpp"
#include "tls/schedule.hpp"

namespace tls {

enum class PlanVariant { Fixed, SemiFixed, QLearningA, QLearningB };

std::string to_string(PlanVariant v);
PlanVariant plan_variant_from_string(const std::string& s);

enum class PhaseTemplate { TwoGreen, SixPhase };

struct DemandSpec {
    long long insertion_interval = 10000;  // steps, at 20000 steps/hour
    std::map<DayPeriod, int> vehicles_per_insertion = {
        {DayPeriod::Low, 5}, {DayPeriod::Medium, 15}, {DayPeriod::High, 30}};
    double medium_bias = 0.7;  // horizontal-route share in Medium
};

struct ExperimentSpec {
    PlanVariant plan = PlanVariant::Fixed;
    int days = 4;
    long long steps_per_hour = 20000;
    std::uint64_t seed = 1;
    int grid_rows = 3;
    int grid_cols = 3;
    double link_length = 200.0;
    int free_flow_time = 20;
    int capacity = 1;
    double vicinity_m = -1.0;
    DemandSpec demand;
    TrafficSchedule schedule = default_schedule();
    AgentConfig agent;
    PhaseTemplate phase_template = PhaseTemplate::TwoGreen;
    std::vector<int> fixed_greens = {60, 60};
    std::map<DayPeriod, std::vector<int>> semifixed_greens = {
        {DayPeriod::Low, {20, 20}},
        {DayPeriod::Medium, {40, 40}},
        {DayPeriod::High, {60, 60}}};
    std::vector<int> initial_greens = {30, 30};
    double drain_hours = 2.0;
};

void validate_spec(const ExperimentSpec& spec);
ExperimentSpec load_spec(const std::string& path);  // JSON, all keys optional

// Nominal intervals are defined at 20000 steps/hour; compressed runs scale
// proportionally.
long long scaled_interval(const ExperimentSpec& spec);
long long horizon_steps(const ExperimentSpec& spec);

RoadNetwork build_network(const ExperimentSpec& spec);

struct DemandEntry {
    std::string id;
    long long depart_step = 0;
    std::string origin;
    std::string dest;
    Route route;
};

// Deterministic function of (spec, network); every plan variant replays the
// same file unchanged.
std::vector<DemandEntry> generate_demand(const ExperimentSpec& spec,
                                         const RoadNetwork& net);

// CSV: vehicle_id,depart_step,origin,dest,route (link ids ';'-joined)
void write_demand_csv(const std::vector<DemandEntry>& entries, const std::string& path);
std::vector<DemandEntry> read_demand_csv(const std::string& path);

struct RunResult {
    std::vector<VehicleRecord> records;
    RunAggregate aggregate;
    std::size_t unfinished = 0;
    long long missing_replies = 0;
    long long steps_run = 0;
};

// Wires network + engine + control API + the plan regime and runs the full
// horizon plus a bounded drain. bus_out, when given, receives the full agent
// message log (Q-learning variants only).
RunResult run_experiment(const ExperimentSpec& spec,
                         const std::vector<DemandEntry>& demand,
                         MessageBus* bus_out = nullptr);

void write_run_outputs(const RunResult& result, const std::string& out_dir);

}  // namespace tls

#endif
