#include "tls/runtime.hpp"

namespace tls {

using nlohmann::json;

AgentRuntime::AgentRuntime(ControlApi& api, MessageBus& bus, AgentConfig cfg,
                           std::uint64_t seed, const TrafficSchedule* schedule,
                           long long steps_per_hour)
    : api_(api), bus_(bus), cfg_(cfg), schedule_(schedule),
      steps_per_hour_(steps_per_hour) {
    validate_agent_config(cfg_);
    if (cfg_.period_in_state && !schedule_)
        throw ConfigError("variant B needs a traffic schedule");
    // Seed captured; agents created in init() once junction ids are known.
    seed_ = seed;
}

json AgentRuntime::call(const std::string& verb, json args) {
    json resp = api_.execute({{"id", next_command_id_++}, {"verb", verb}, {"args", args}});
    if (resp["status"] != "OK")
        throw ConfigError("control call " + verb + " failed: " + resp["error"].dump());
    return resp["payload"];
}

void AgentRuntime::init() {
    json tls = call("TL_LIST", json::object());
    for (const auto& tl : tls["tls"]) {
        const std::string id = tl.get<std::string>();
        auto agent = std::make_unique<TrafficAgent>(id, cfg_,
                                                    agent_stream_seed(seed_, id));
        json nb = call("TL_NEIGHBORS", {{"tl", id}});
        std::vector<std::pair<std::string, double>> neighbors;
        for (const auto& n : nb["neighbors"])
            neighbors.push_back({n["tl"].get<std::string>(), n["distance"].get<double>()});
        agent->set_neighbors(std::move(neighbors));
        agents_.emplace(id, std::move(agent));
    }
}

void AgentRuntime::handle_step(const json& step_payload) {
    const long long step = step_payload["step"].get<long long>();
    for (auto& [id, agent] : agents_)
        agent->record_sample(call("TL_COUNT_NEAR", {{"tl", id}})["count"].get<double>());

    std::vector<std::string> completed;
    for (const auto& j : step_payload["completed_cycles"])
        completed.push_back(j.get<std::string>());
    if (completed.empty()) return;

    // Pass 1: everyone with a finished cycle folds its reward and queries.
    for (const auto& id : completed)
        for (auto& q : agents_.at(id)->begin_cycle_exchange()) bus_.send(std::move(q));

    // Pass 2: all agents answer the queries in their inbox.
    std::map<std::string, std::vector<AgentMessage>> kept;  // non-query traffic
    for (auto& [id, agent] : agents_) {
        std::vector<AgentMessage> queries;
        for (auto& m : bus_.drain(id)) {
            if (m.performative == Performative::QueryRef) queries.push_back(std::move(m));
            else kept[id].push_back(std::move(m));
        }
        for (auto& r : agent->answer_queries(queries)) bus_.send(std::move(r));
    }

    // Pass 3: requesters collect replies, update and act.
    const std::optional<DayPeriod> next_period =
        cfg_.period_in_state
            ? std::optional<DayPeriod>(level_at(*schedule_, step + 1, steps_per_hour_))
            : std::nullopt;
    for (const auto& id : completed) {
        auto& agent = *agents_.at(id);
        std::vector<AgentMessage> informs = kept.count(id) ? std::move(kept[id])
                                                           : std::vector<AgentMessage>{};
        for (auto& m : bus_.drain(id)) informs.push_back(std::move(m));
        json plan = call("TL_GET_PLAN", {{"tl", id}});
        std::vector<int> durations;
        for (const auto& ph : plan["phases"])
            if (ph["variable"].get<bool>()) durations.push_back(ph["duration"].get<int>());
        auto next = agent.finish_cycle_exchange(informs, durations, next_period);
        call("TL_SET_PLAN_PENDING", {{"tl", id}, {"durations", next}});
    }
}

const TrafficAgent& AgentRuntime::agent(const std::string& id) const {
    return *agents_.at(id);
}

long long AgentRuntime::missing_replies() const {
    long long n = 0;
    for (const auto& [id, a] : agents_) n += a->missing_replies();
    return n;
}

}  // namespace tls
