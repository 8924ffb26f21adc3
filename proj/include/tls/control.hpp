#ifndef TLS_CONTROL_HPP
#define TLS_CONTROL_HPP

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tls/agents.hpp"
#include "tls/schedule.hpp"
#include "tls/sim.hpp"

namespace tls {

// Raised by verb handlers; mapped onto the wire error object.
struct ApiError {
    std::string code;  // PARSE, VERB, ARGS, STATE, PLAN_INVALID, UNKNOWN_ID
    std::string message;
};

// Simulator-agnostic control surface. The in-process adapter and the wire
// server share this dispatcher, so both paths are behaviorally identical.
//
// Verbs: SIM_STEP, GET_TIME, TL_LIST, TL_GET_PLAN, TL_SET_PLAN_PENDING,
// TL_GET_CYCLE_POS, TL_COUNT_NEAR, TL_NEIGHBORS, VEH_DRAIN_ARRIVED,
// SET_PERIOD_PLAN, AGENT_MSG.
class ControlApi {
public:
    explicit ControlApi(Engine& engine) : engine_(engine) {}

    void attach_bus(MessageBus* bus) { bus_ = bus; }
    // Enables SET_PERIOD_PLAN-driven semi-fixed switching on SIM_STEP.
    void attach_schedule(const TrafficSchedule* schedule) { schedule_ = schedule; }

    // Full Command object in, full Response object out. Never throws for
    // protocol-level errors; serialized against concurrent sessions.
    nlohmann::json execute(const nlohmann::json& command, bool controlling = true);

    // One wire line in, one wire line out (without the trailing LF).
    std::string execute_line(const std::string& line, bool controlling = true);

    Engine& engine() { return engine_; }

private:
    nlohmann::json dispatch(const std::string& verb, const nlohmann::json& args,
                            bool controlling);
    void apply_period_plans();

    Engine& engine_;
    MessageBus* bus_ = nullptr;
    const TrafficSchedule* schedule_ = nullptr;
    std::map<std::string, std::map<DayPeriod, std::vector<int>>> period_durations_;
    std::mutex mu_;
};

nlohmann::json plan_to_json(const SemaphorePlan& plan);

}  // namespace tls

#endif
