// Acceptance checks for the simulator, learning core, and control protocol.
// Each criterion prints one [PASS]/[FAIL] line; the exit code is the number of
// failed criteria.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tls/agents.hpp"
#include "tls/control.hpp"
#include "tls/metrics.hpp"
#include "tls/runtime.hpp"
#include "tls/scenario.hpp"
#include "tls/sim.hpp"
#include "tls/wire.hpp"

using namespace tls;
using nlohmann::json;

namespace {

int failures = 0;
std::vector<std::string> notes;

void report(int n, const char* name, bool ok) {
    std::printf("[%s] %d. %s\n", ok ? "PASS" : "FAIL", n, name);
    if (!ok) ++failures;
}

void note(const std::string& s) { notes.push_back(s); }

bool expect(bool cond, const std::string& what) {
    if (!cond) note("  check failed: " + what);
    return cond;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

bool criterion_state_space() {
    bool ok = true;
    ok &= expect(enumerate_states(2, false) == 81, "2-phase state count 81");
    ok &= expect(enumerate_states(3, false) == 729, "3-phase state count 729");
    ok &= expect(enumerate_states(2, true) == 243, "2-phase period-tagged count 243");
    ok &= expect(enumerate_states(3, true) == 2187, "3-phase period-tagged count 2187");
    // uniform adjustment: one shared delta per state, so at most 3 actions,
    // giving the 81*3 / 729*3 pair budgets
    ok &= expect(81 * 3 == 243 && 729 * 3 == 2187, "pair budget arithmetic");
    for (const std::vector<int>& d :
         {std::vector<int>{20, 20}, {40, 35}, {60, 60}, {25, 60}}) {
        const auto acts = legal_actions(d, ActionMode::Uniform);
        ok &= expect(acts.size() <= 3 && !acts.empty(), "uniform action count bound");
        for (const auto& a : acts)
            for (std::size_t i = 0; i < d.size(); ++i)
                ok &= expect(d[i] + a.deltas[i] >= 20 && d[i] + a.deltas[i] <= 60,
                             "action keeps durations in range");
    }
    ok &= expect(legal_actions({30, 45}, ActionMode::Uniform).size() == 3,
                 "interior state has all 3 uniform actions");
    return ok;
}

bool criterion_q_update() {
    bool ok = true;
    std::mt19937_64 rng(7);
    auto unif = [&] { return (rng() >> 11) * 0x1.0p-53 * 4.0 - 2.0; };
    for (int i = 0; i < 100; ++i) {
        QTable table;
        QState s{{30, 40}, std::nullopt};
        QState s2{{35, 40}, std::nullopt};
        const auto legal = legal_actions(s.durations, ActionMode::Uniform);
        const auto legal2 = legal_actions(s2.durations, ActionMode::Uniform);
        for (const auto& a : legal) table.set(s, a, unif());
        for (const auto& a : legal2) table.set(s2, a, unif());
        const QAction& a = legal[rng() % legal.size()];
        const double alpha = (rng() >> 11) * 0x1.0p-53;
        const double gamma = (rng() >> 11) * 0x1.0p-53;
        const double r = unif();

        // independent oracle, straight from the one-step update formula
        double best_next = table.get(s2, legal2[0]);
        for (const auto& an : legal2) best_next = std::max(best_next, table.get(s2, an));
        const double expected =
            (1.0 - alpha) * table.get(s, a) + alpha * (r + gamma * best_next);

        const double got = q_update(table, s, a, r, s2, legal2, alpha, gamma);
        ok &= expect(std::abs(got - expected) < 1e-12, "q_update matches oracle");
        ok &= expect(std::abs(table.get(s, a) - expected) < 1e-12, "table stores update");
    }
    return ok;
}

bool criterion_rewards() {
    bool ok = true;
    ok &= expect(own_reward({0, 0, 0}) == 0.0, "empty vicinity gives reward 0");
    ok &= expect(std::abs(own_reward({2, 4, 6}) - (-4.0)) < 1e-12, "mean of 2,4,6");
    ok &= expect(std::abs(own_reward({3}) - (-3.0)) < 1e-12, "single sample");
    // equal distances weight neighbors equally
    ok &= expect(std::abs(combined_reward(-2, {{-4, 200}, {-2, 200}}) -
                          (0.5 * -2 + 0.5 * -3)) < 1e-12,
                 "equal-distance combination");
    // closer neighbors count for more under inverse-distance weighting
    ok &= expect(std::abs(combined_reward(-2, {{-6, 100}, {-1, 400}}) -
                          (0.5 * -2 + 0.5 * ((-6 / 100.0 + -1 / 400.0) /
                                             (1 / 100.0 + 1 / 400.0)))) < 1e-12,
                 "inverse-distance combination");
    ok &= expect(combined_reward(-5, {}) == -5.0, "no neighbors degenerates to own");

    std::mt19937_64 rng(11);
    auto unif = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < 1000; ++i) {
        const double own = -10.0 * unif();
        std::vector<std::pair<double, double>> nb;
        const int n = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k) nb.push_back({-10.0 * unif(), 50.0 + 400.0 * unif()});
        const double k = 0.1 + 5.0 * unif();
        auto scaled = nb;
        for (auto& p : scaled) p.first *= k;
        const double lhs = combined_reward(k * own, scaled);
        const double rhs = k * combined_reward(own, nb);
        ok &= expect(std::abs(lhs - rhs) < 1e-9, "combination is linear in rewards");
        ok &= expect(combined_reward(own, nb) <= 0.0, "rewards stay non-positive");
    }
    return ok;
}

bool criterion_discharge_oracle() {
    bool ok = true;
    RoadNetwork net = build_grid(1, 1, 200, 1, 1);
    SemaphorePlan plan;
    plan.junction = "J_0_0";
    const std::size_t width = net.incoming("J_0_0").size();
    plan.phases.push_back({5, std::vector<ManeuverColor>(width, ManeuverColor::Red), false});
    plan.phases.push_back({2, std::vector<ManeuverColor>(width, ManeuverColor::Green), false});
    plan.phases.push_back({93, std::vector<ManeuverColor>(width, ManeuverColor::Red), false});
    std::map<std::string, SemaphorePlan> plans;
    plans.emplace("J_0_0", plan);
    Engine eng(std::move(net), std::move(plans));
    const Route route{{"B_W_0>J_0_0", "J_0_0>B_E_0"}};
    eng.schedule_vehicle("v1", route, 0);
    eng.schedule_vehicle("v2", route, 0);
    eng.schedule_vehicle("v3", route, 0);

    const std::vector<std::size_t> expected_queue = {0, 3, 3, 3, 3, 2, 1, 1};
    std::map<std::string, VehicleRecord> done;
    for (int t = 0; t <= 7; ++t) {
        StepReport r = eng.step();
        ok &= expect(r.queue_lengths.at("B_W_0>J_0_0") == expected_queue[t],
                     "queue length at step " + std::to_string(t));
        for (auto& rec : eng.drain_arrived()) done[rec.id] = rec;
    }
    while (eng.now() <= 110) eng.step();
    for (auto& rec : eng.drain_arrived()) done[rec.id] = rec;

    struct Expected { const char* id; long long arrive, wait; int stops; };
    for (const Expected& e : {Expected{"v1", 6, 4, 2}, {"v2", 7, 5, 2}, {"v3", 106, 104, 2}}) {
        ok &= expect(done.count(e.id) == 1, std::string(e.id) + " arrived");
        if (!done.count(e.id)) continue;
        ok &= expect(done[e.id].arrive_step == e.arrive, std::string(e.id) + " arrive step");
        ok &= expect(done[e.id].waiting_steps == e.wait, std::string(e.id) + " waiting steps");
        ok &= expect(done[e.id].stop_count == e.stops, std::string(e.id) + " stop count");
    }
    return ok;
}

ExperimentSpec compressed_spec(PlanVariant plan, int days, std::uint64_t seed,
                               long long interval) {
    ExperimentSpec spec;
    spec.plan = plan;
    spec.days = days;
    spec.steps_per_hour = 200;
    spec.seed = seed;
    spec.demand.insertion_interval = interval;
    return spec;
}

bool criterion_variant_runs() {
    bool ok = true;
    const std::string out = "acceptance_out/variants";
    std::filesystem::create_directories(out);
    ExperimentSpec base = compressed_spec(PlanVariant::Fixed, 1, 21, 10000);
    RoadNetwork net = build_network(base);
    const auto demand = generate_demand(base, net);
    ok &= expect(!demand.empty(), "demand is non-empty");

    for (PlanVariant plan : {PlanVariant::Fixed, PlanVariant::SemiFixed,
                             PlanVariant::QLearningA, PlanVariant::QLearningB}) {
        ExperimentSpec spec = base;
        spec.plan = plan;
        const std::string label = to_string(plan);
        RunResult first = run_experiment(spec, demand);
        RunResult second = run_experiment(spec, demand);
        ok &= expect(first.records.size() + first.unfinished == demand.size(),
                     label + ": every scheduled vehicle accounted for");
        ok &= expect(first.records.size() > 0, label + ": some vehicles completed");
        const std::string d1 = out + "/" + label + "_run1";
        const std::string d2 = out + "/" + label + "_run2";
        write_run_outputs(first, d1);
        write_run_outputs(second, d2);
        ok &= expect(slurp(d1 + "/vehicles.csv") == slurp(d2 + "/vehicles.csv"),
                     label + ": per-vehicle output reproduces byte-identically");
        ok &= expect(slurp(d1 + "/aggregate.csv") == slurp(d2 + "/aggregate.csv"),
                     label + ": aggregate output reproduces byte-identically");
    }
    return ok;
}

bool criterion_wire_equivalence() {
    bool ok = true;
    auto make_engine = [] {
        RoadNetwork net = build_grid(2, 2, 100, 10, 1);
        std::map<std::string, SemaphorePlan> plans;
        for (const auto& jid : net.signalized_ids())
            plans.emplace(jid, default_two_green_plan(net, jid, 20, 20));
        Engine eng(std::move(net), std::move(plans));
        std::mt19937_64 rng(5);
        std::vector<std::string> boundary;
        for (const auto& jid : eng.network().junction_ids())
            if (!eng.network().junction(jid).signalized) boundary.push_back(jid);
        for (int i = 0; i < 40; ++i) {
            std::string o = boundary[rng() % boundary.size()], d;
            do {
                d = boundary[rng() % boundary.size()];
            } while (d == o);
            eng.schedule_vehicle("v" + std::to_string(i),
                                 shortest_route(eng.network(), o, d),
                                 static_cast<long long>(rng() % 100));
        }
        return eng;
    };

    Engine wire_eng = make_engine();
    ControlApi wire_api(wire_eng);
    WireServer server(wire_api, "127.0.0.1", 0);
    server.start();
    WireClient client("127.0.0.1", server.port());

    Engine local_eng = make_engine();
    ControlApi local_api(local_eng);

    std::vector<json> script;
    long long id = 1;
    script.push_back({{"id", id++}, {"verb", "TL_LIST"}});
    for (int t = 0; t < 60; ++t) {
        script.push_back({{"id", id++}, {"verb", "SIM_STEP"}});
        script.push_back({{"id", id++},
                          {"verb", "TL_GET_CYCLE_POS"},
                          {"args", {{"tl", "J_0_1"}}}});
        script.push_back({{"id", id++},
                          {"verb", "TL_COUNT_NEAR"},
                          {"args", {{"tl", "J_1_0"}}}});
        script.push_back({{"id", id++}, {"verb", "GET_TIME"}});
    }
    script.push_back({{"id", id++}, {"verb", "VEH_DRAIN_ARRIVED"}});
    // > 200 commands, replayed on both transports

    std::size_t mismatches = 0;
    for (const auto& c : script) {
        json remote = json::parse(client.request(c.dump()));
        json local = local_api.execute(c);
        if (remote != local) ++mismatches;
    }
    ok &= expect(script.size() > 200, "scripted session exceeds 200 commands");
    ok &= expect(mismatches == 0, "all responses identical across transports");

    client.close();
    server.stop();
    return ok;
}

bool criterion_error_handling() {
    bool ok = true;
    RoadNetwork net = build_grid(1, 1, 200, 20, 1);
    std::map<std::string, SemaphorePlan> plans;
    plans.emplace("J_0_0", default_two_green_plan(net, "J_0_0", 20, 20));
    Engine eng(std::move(net), std::move(plans));
    ControlApi api(eng);
    WireServer server(api, "127.0.0.1", 0);
    server.start();
    WireClient client("127.0.0.1", server.port());

    json parse_err = json::parse(client.request("{{{ not json"));
    ok &= expect(parse_err["status"] == "ERR" && parse_err["error"]["code"] == "PARSE",
                 "malformed line yields PARSE");

    json verb_err = json::parse(
        client.request(json{{"id", 2}, {"verb", "BOGUS"}}.dump()));
    ok &= expect(verb_err["error"]["code"] == "VERB", "unknown verb yields VERB");

    json plan_err = json::parse(client.request(
        json{{"id", 3},
             {"verb", "TL_SET_PLAN_PENDING"},
             {"args", {{"tl", "J_0_0"}, {"durations", json::array({20, 65})}}}}
            .dump()));
    ok &= expect(plan_err["error"]["code"] == "PLAN_INVALID",
                 "out-of-range duration yields PLAN_INVALID");

    json args_err = json::parse(
        client.request(json{{"id", 4}, {"verb", "TL_GET_PLAN"}}.dump()));
    ok &= expect(args_err["error"]["code"] == "ARGS", "missing arg yields ARGS");

    // session still alive and consistent after every error
    json after = json::parse(client.request(json{{"id", 5}, {"verb", "GET_TIME"}}.dump()));
    ok &= expect(after["status"] == "OK" && after["payload"]["step"] == 0,
                 "session survives protocol errors with state intact");

    client.close();
    server.stop();
    return ok;
}

bool criterion_trends() {
    bool ok = true;
    const std::string out = "acceptance_out/matrix";
    std::filesystem::create_directories(out);
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    const std::vector<long long> intervals = {7000, 10000};
    const std::vector<PlanVariant> plans = {PlanVariant::Fixed, PlanVariant::SemiFixed,
                                            PlanVariant::QLearningA,
                                            PlanVariant::QLearningB};

    // mean_wait[plan][interval][seed], std_travel likewise
    std::map<std::string, std::map<long long, std::map<std::uint64_t, double>>> wait;
    std::map<std::string, std::map<long long, std::map<std::uint64_t, double>>> spread;
    std::vector<RunAggregate> rows;
    for (std::uint64_t seed : seeds) {
        for (long long interval : intervals) {
            ExperimentSpec base = compressed_spec(PlanVariant::Fixed, 4, seed, interval);
            // loads high enough that the approaches run near saturation at the
            // heavier interval; below that, waits are pure signal delay and
            // barely respond to demand
            base.demand.vehicles_per_insertion = {{DayPeriod::Low, 30},
                                                  {DayPeriod::Medium, 120},
                                                  {DayPeriod::High, 240}};
            // per-phase adjustment lets the learners allocate green between
            // the two directions; with the horizontally biased midday demand
            // that split is the quantity worth learning per day period
            base.agent.mode = ActionMode::PerPhase;
            RoadNetwork net = build_network(base);
            const auto demand = generate_demand(base, net);
            for (PlanVariant plan : plans) {
                ExperimentSpec spec = base;
                spec.plan = plan;
                RunResult r = run_experiment(spec, demand);
                wait[to_string(plan)][interval][seed] = r.aggregate.mean_wait;
                spread[to_string(plan)][interval][seed] = r.aggregate.std_travel;
                rows.push_back(r.aggregate);
            }
        }
    }
    export_aggregate_csv(rows, out + "/matrix.csv");

    // (a) heavier demand produces longer waits, per plan, on seed-averaged means
    for (const auto& [plan, by_interval] : wait) {
        double heavy = 0, light = 0;
        for (std::uint64_t s : seeds) {
            heavy += by_interval.at(7000).at(s);
            light += by_interval.at(10000).at(s);
        }
        ok &= expect(heavy > light,
                     plan + ": mean wait at interval 7000 exceeds interval 10000 (" +
                         format_double(heavy / seeds.size()) + " vs " +
                         format_double(light / seeds.size()) + ")");
    }

    // (b) the static plan has the worst mean wait on most seeds
    int fixed_worst = 0;
    for (std::uint64_t s : seeds) {
        const double fixed = wait["fixed"][10000][s];
        bool worst = true;
        for (const auto& [plan, by_interval] : wait)
            if (plan != "fixed" && by_interval.at(10000).at(s) > fixed) worst = false;
        if (worst) ++fixed_worst;
    }
    ok &= expect(fixed_worst >= 4,
                 "fixed plan is the worst performer on " + std::to_string(fixed_worst) +
                     "/5 seeds (need >= 4)");

    // (c) period-aware learning is at least as consistent as period-blind
    int qb_tighter = 0;
    for (std::uint64_t s : seeds)
        if (spread["qb"][10000][s] <= spread["qa"][10000][s]) ++qb_tighter;
    ok &= expect(qb_tighter >= 4,
                 "period-tagged learner travel-time spread <= period-blind on " +
                     std::to_string(qb_tighter) + "/5 seeds (need >= 4)");
    return ok;
}

bool criterion_message_accounting() {
    bool ok = true;
    ExperimentSpec spec = compressed_spec(PlanVariant::QLearningA, 1, 77, 10000);
    RoadNetwork net = build_network(spec);
    const auto demand = generate_demand(spec, net);
    MessageBus bus;
    RunResult r = run_experiment(spec, demand, &bus);
    const auto& log = bus.log();
    ok &= expect(!log.empty(), "agents exchanged messages");

    std::size_t queries = 0, informs = 0;
    std::map<std::string, const AgentMessage*> open;  // conversation -> query
    std::size_t orphans = 0, bad_queries = 0, dup_conversations = 0;
    for (const auto& m : log) {
        if (m.performative == Performative::QueryRef) {
            ++queries;
            if (m.content_text != "reward") ++bad_queries;
            if (!open.emplace(m.conversation, &m).second) ++dup_conversations;
        } else {
            ++informs;
            auto it = open.find(m.conversation);
            if (it == open.end() || it->second->sender != m.receiver ||
                it->second->receiver != m.sender)
                ++orphans;
        }
    }
    ok &= expect(bad_queries == 0, "every query asks for \"reward\"");
    ok &= expect(dup_conversations == 0, "conversation ids are unique");
    ok &= expect(orphans == 0,
                 "every reply answers a prior query on the same conversation, "
                 "with the endpoints swapped");
    ok &= expect(queries == informs + static_cast<std::size_t>(r.missing_replies),
                 "queries (" + std::to_string(queries) + ") = replies (" +
                     std::to_string(informs) + ") + unanswered (" +
                     std::to_string(r.missing_replies) + ")");
    ok &= expect(informs > 0, "at least one reward was shared");
    return ok;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*fn)();
    };
    const Criterion criteria[] = {
        {"state and action space sizes", criterion_state_space},
        {"value update against an independent oracle", criterion_q_update},
        {"own and combined reward arithmetic", criterion_rewards},
        {"hand-traced queue discharge", criterion_discharge_oracle},
        {"all plan variants run deterministically", criterion_variant_runs},
        {"wire and in-process transports are equivalent", criterion_wire_equivalence},
        {"protocol errors are survivable and precise", criterion_error_handling},
        {"congestion and control trends", criterion_trends},
        {"reward exchange message accounting", criterion_message_accounting},
    };
    int n = 1;
    for (const auto& c : criteria) {
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            note(std::string("  exception: ") + e.what());
        }
        report(n++, c.name, ok);
        for (const auto& s : notes) std::printf("%s\n", s.c_str());
        notes.clear();
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
