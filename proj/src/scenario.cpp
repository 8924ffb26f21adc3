#include "tls/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tls/control.hpp"
#include "tls/runtime.hpp"
#include "tls/sim.hpp"

namespace tls {

using nlohmann::json;

std::string to_string(PlanVariant v) {
    switch (v) {
        case PlanVariant::Fixed: return "fixed";
        case PlanVariant::SemiFixed: return "semifixed";
        case PlanVariant::QLearningA: return "qa";
        case PlanVariant::QLearningB: return "qb";
    }
    return "?";
}

PlanVariant plan_variant_from_string(const std::string& s) {
    if (s == "fixed") return PlanVariant::Fixed;
    if (s == "semifixed") return PlanVariant::SemiFixed;
    if (s == "qa") return PlanVariant::QLearningA;
    if (s == "qb") return PlanVariant::QLearningB;
    throw ConfigError("unknown plan variant: " + s);
}

namespace {

std::size_t greens_for_template(PhaseTemplate t) {
    return t == PhaseTemplate::TwoGreen ? 2 : 3;
}

SemaphorePlan make_plan(const RoadNetwork& net, const std::string& junction,
                        PhaseTemplate t, const std::vector<int>& greens) {
    if (greens.size() != greens_for_template(t))
        throw ConfigError("green split count does not match phase template");
    if (t == PhaseTemplate::TwoGreen)
        return default_two_green_plan(net, junction, greens[0], greens[1]);
    return six_phase_plan(net, junction, greens[0], greens[1], greens[2]);
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
    if (spec.days < 1) throw ConfigError("days must be >= 1");
    if (spec.steps_per_hour < 1) throw ConfigError("steps_per_hour must be >= 1");
    if (spec.grid_rows < 1 || spec.grid_cols < 1)
        throw ConfigError("grid dimensions must be >= 1");
    if (spec.demand.insertion_interval <= 0)
        throw ConfigError("insertion interval must be positive");
    if (spec.demand.medium_bias < 0.0 || spec.demand.medium_bias > 1.0)
        throw ConfigError("medium_bias must lie in [0, 1]");
    for (const auto& [level, n] : spec.demand.vehicles_per_insertion)
        if (n < 0) throw ConfigError("vehicles_per_insertion must be >= 0");
    if (spec.drain_hours < 0.0) throw ConfigError("drain_hours must be >= 0");
    validate_schedule(spec.schedule);
    validate_agent_config(spec.agent);
    const std::size_t k = greens_for_template(spec.phase_template);
    auto check_greens = [&](const std::vector<int>& g, const char* what) {
        if (g.size() != k)
            throw ConfigError(std::string(what) + ": expected " + std::to_string(k) +
                              " green durations");
    };
    check_greens(spec.fixed_greens, "fixed_greens");
    check_greens(spec.initial_greens, "initial_greens");
    for (const auto& [level, g] : spec.semifixed_greens)
        check_greens(g, "semifixed_greens");
}

long long scaled_interval(const ExperimentSpec& spec) {
    const double scaled = static_cast<double>(spec.demand.insertion_interval) *
                          static_cast<double>(spec.steps_per_hour) / 20000.0;
    return std::max<long long>(1, std::llround(scaled));
}

long long horizon_steps(const ExperimentSpec& spec) {
    return static_cast<long long>(spec.days) * 24 * spec.steps_per_hour;
}

RoadNetwork build_network(const ExperimentSpec& spec) {
    return build_grid(spec.grid_rows, spec.grid_cols, spec.link_length,
                      spec.free_flow_time, spec.capacity);
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded()) throw ConfigError("malformed JSON config: " + path);

    ExperimentSpec spec;
    if (cfg.contains("plan"))
        spec.plan = plan_variant_from_string(cfg["plan"].get<std::string>());
    spec.days = cfg.value("days", spec.days);
    spec.steps_per_hour = cfg.value("steps_per_hour", spec.steps_per_hour);
    spec.seed = cfg.value("seed", spec.seed);
    if (cfg.contains("grid")) {
        const json& g = cfg["grid"];
        spec.grid_rows = g.value("rows", spec.grid_rows);
        spec.grid_cols = g.value("cols", spec.grid_cols);
        spec.link_length = g.value("link_length", spec.link_length);
        spec.free_flow_time = g.value("free_flow_time", spec.free_flow_time);
        spec.capacity = g.value("capacity", spec.capacity);
    }
    spec.vicinity_m = cfg.value("vicinity_m", spec.vicinity_m);
    if (cfg.contains("demand")) {
        const json& d = cfg["demand"];
        spec.demand.insertion_interval = d.value("interval", spec.demand.insertion_interval);
        spec.demand.medium_bias = d.value("medium_bias", spec.demand.medium_bias);
        if (d.contains("vehicles"))
            for (const auto& [name, n] : d["vehicles"].items())
                spec.demand.vehicles_per_insertion[day_period_from_string(name)] =
                    n.get<int>();
    }
    if (cfg.contains("schedule")) {
        spec.schedule.entries.clear();
        for (const auto& e : cfg["schedule"])
            spec.schedule.entries.push_back(
                {e.at("hour").get<double>(),
                 day_period_from_string(e.at("level").get<std::string>())});
    }
    if (cfg.contains("agent")) {
        const json& a = cfg["agent"];
        spec.agent.alpha = a.value("alpha", spec.agent.alpha);
        spec.agent.gamma = a.value("gamma", spec.agent.gamma);
        spec.agent.epsilon = a.value("epsilon", spec.agent.epsilon);
        spec.agent.own_weight = a.value("own_weight", spec.agent.own_weight);
        spec.agent.neighbor_weight = a.value("neighbor_weight", spec.agent.neighbor_weight);
        if (a.contains("action_mode")) {
            const std::string m = a["action_mode"].get<std::string>();
            if (m == "uniform") spec.agent.mode = ActionMode::Uniform;
            else if (m == "perphase") spec.agent.mode = ActionMode::PerPhase;
            else throw ConfigError("unknown action_mode: " + m);
        }
        if (a.contains("weighting")) {
            const std::string w = a["weighting"].get<std::string>();
            if (w == "inverse") spec.agent.weighting = WeightMode::InverseDistance;
            else if (w == "proportional")
                spec.agent.weighting = WeightMode::ProportionalDistance;
            else throw ConfigError("unknown weighting: " + w);
        }
    }
    if (cfg.contains("template")) {
        const std::string t = cfg["template"].get<std::string>();
        if (t == "two_green") spec.phase_template = PhaseTemplate::TwoGreen;
        else if (t == "six_phase") spec.phase_template = PhaseTemplate::SixPhase;
        else throw ConfigError("unknown phase template: " + t);
    }
    if (cfg.contains("fixed_greens"))
        spec.fixed_greens = cfg["fixed_greens"].get<std::vector<int>>();
    if (cfg.contains("initial_greens"))
        spec.initial_greens = cfg["initial_greens"].get<std::vector<int>>();
    if (cfg.contains("semifixed_greens"))
        for (const auto& [name, g] : cfg["semifixed_greens"].items())
            spec.semifixed_greens[day_period_from_string(name)] =
                g.get<std::vector<int>>();
    spec.drain_hours = cfg.value("drain_hours", spec.drain_hours);

    validate_spec(spec);
    return spec;
}

namespace {

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

double draw01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<DemandEntry> generate_demand(const ExperimentSpec& spec,
                                         const RoadNetwork& net) {
    validate_spec(spec);
    std::vector<std::string> boundary;
    for (const auto& jid : net.junction_ids())
        if (!net.junction(jid).signalized) boundary.push_back(jid);
    if (boundary.size() < 2) throw ConfigError("network has too few boundary junctions");

    std::mt19937_64 rng(spec.seed);
    std::vector<DemandEntry> entries;
    const long long interval = scaled_interval(spec);
    const long long horizon = horizon_steps(spec);
    std::size_t next_id = 0;

    for (long long step = 0; step < horizon; step += interval) {
        const DayPeriod level = level_at(spec.schedule, step, spec.steps_per_hour);
        auto it = spec.demand.vehicles_per_insertion.find(level);
        const int count = it == spec.demand.vehicles_per_insertion.end() ? 0 : it->second;
        for (int k = 0; k < count; ++k) {
            std::string origin, dest;
            if (level == DayPeriod::Medium && draw01(rng) < spec.demand.medium_bias) {
                // horizontal west-east flow
                const bool west_to_east = draw(rng, 2) == 0;
                const int r1 = static_cast<int>(draw(rng, spec.grid_rows));
                const int r2 = static_cast<int>(draw(rng, spec.grid_rows));
                origin = (west_to_east ? "B_W_" : "B_E_") + std::to_string(r1);
                dest = (west_to_east ? "B_E_" : "B_W_") + std::to_string(r2);
            } else {
                origin = boundary[draw(rng, boundary.size())];
                do {
                    dest = boundary[draw(rng, boundary.size())];
                } while (dest == origin);
            }
            DemandEntry e;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "V%06zu", next_id++);
            e.id = buf;
            e.depart_step = step;
            e.origin = origin;
            e.dest = dest;
            e.route = shortest_route(net, origin, dest);
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

void write_demand_csv(const std::vector<DemandEntry>& entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << "vehicle_id,depart_step,origin,dest,route\n";
    for (const auto& e : entries) {
        out << e.id << ',' << e.depart_step << ',' << e.origin << ',' << e.dest << ',';
        for (std::size_t i = 0; i < e.route.links.size(); ++i) {
            if (i) out << ';';
            out << e.route.links[i];
        }
        out << '\n';
    }
}

std::vector<DemandEntry> read_demand_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open demand file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "vehicle_id,depart_step,origin,dest,route")
        throw ConfigError("bad demand file header: " + path);
    std::vector<DemandEntry> entries;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        DemandEntry e;
        std::string depart, routestr;
        if (!std::getline(ss, e.id, ',') || !std::getline(ss, depart, ',') ||
            !std::getline(ss, e.origin, ',') || !std::getline(ss, e.dest, ',') ||
            !std::getline(ss, routestr))
            throw ConfigError("bad demand row: " + line);
        e.depart_step = std::stoll(depart);
        std::istringstream rs(routestr);
        std::string lid;
        while (std::getline(rs, lid, ';')) e.route.links.push_back(lid);
        entries.push_back(std::move(e));
    }
    return entries;
}

RunResult run_experiment(const ExperimentSpec& spec,
                         const std::vector<DemandEntry>& demand, MessageBus* bus_out) {
    validate_spec(spec);
    RoadNetwork net = build_network(spec);

    const bool learning =
        spec.plan == PlanVariant::QLearningA || spec.plan == PlanVariant::QLearningB;
    const std::vector<int>* greens = nullptr;
    switch (spec.plan) {
        case PlanVariant::Fixed: greens = &spec.fixed_greens; break;
        case PlanVariant::SemiFixed:
            greens = &spec.semifixed_greens.at(
                level_at(spec.schedule, 0, spec.steps_per_hour));
            break;
        default: greens = &spec.initial_greens; break;
    }

    std::map<std::string, SemaphorePlan> plans;
    for (const auto& jid : net.signalized_ids())
        plans.emplace(jid, make_plan(net, jid, spec.phase_template, *greens));

    SimParams params;
    params.steps_per_hour = spec.steps_per_hour;
    params.vicinity_m = spec.vicinity_m;
    Engine engine(std::move(net), std::move(plans), params);
    for (const auto& e : demand)
        engine.schedule_vehicle(e.id, e.route, e.depart_step);

    ControlApi api(engine);
    long long cmd_id = 1;
    auto call = [&](const std::string& verb, json args) {
        json resp = api.execute({{"id", cmd_id++}, {"verb", verb}, {"args", args}});
        if (resp["status"] != "OK")
            throw ConfigError("control call " + verb + " failed: " + resp["error"].dump());
        return resp["payload"];
    };

    if (spec.plan == PlanVariant::SemiFixed) {
        api.attach_schedule(&spec.schedule);
        for (const auto& jid : engine.network().signalized_ids())
            for (const auto& [period, g] : spec.semifixed_greens)
                call("SET_PERIOD_PLAN",
                     {{"tl", jid}, {"period", to_string(period)}, {"durations", g}});
    }

    MessageBus local_bus;
    MessageBus& bus = bus_out ? *bus_out : local_bus;
    std::optional<AgentRuntime> runtime;
    if (learning) {
        AgentConfig cfg = spec.agent;
        cfg.period_in_state = spec.plan == PlanVariant::QLearningB;
        runtime.emplace(api, bus, cfg, spec.seed, &spec.schedule, spec.steps_per_hour);
        runtime->init();
    }

    const long long horizon = horizon_steps(spec);
    const long long cap =
        horizon + std::llround(spec.drain_hours * static_cast<double>(spec.steps_per_hour));
    RunResult result;
    while (engine.now() < horizon ||
           (engine.now() < cap &&
            (engine.in_network() > 0 || engine.pending_insertions() > 0))) {
        json payload = call("SIM_STEP", json::object());
        if (runtime) runtime->handle_step(payload);
        if (engine.scheduled_total() !=
            engine.arrived_total() + engine.in_network() + engine.pending_insertions())
            throw ContractError("vehicle conservation violated");
    }
    result.steps_run = engine.now();
    result.records = engine.drain_arrived();
    engine.close();

    result.unfinished = engine.scheduled_total() - engine.arrived_total();
    if (runtime) result.missing_replies = runtime->missing_replies();
    if (!result.records.empty()) {
        result.aggregate = aggregate(result.records);
    }
    result.aggregate.plan = to_string(spec.plan);
    result.aggregate.interval = spec.demand.insertion_interval;
    result.aggregate.seed = spec.seed;
    result.aggregate.unfinished = result.unfinished;
    return result;
}

void write_run_outputs(const RunResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    export_vehicle_csv(result.records, out_dir + "/vehicles.csv");
    export_aggregate_csv({result.aggregate}, out_dir + "/aggregate.csv");
}

}  // namespace tls
