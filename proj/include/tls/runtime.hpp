#ifndef TLS_RUNTIME_HPP
#define TLS_RUNTIME_HPP

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "tls/agents.hpp"
#include "tls/control.hpp"

namespace tls {

// Drives one TrafficAgent per signalized junction against the control API
// under the step-barrier contract: every handle_step() runs to completion
// before the harness issues the next SIM_STEP. Agents are ticked in ascending
// id order; reward exchange goes through the message bus in three passes
// (queries out, answers, collection) so replies land within the window.
class AgentRuntime {
public:
    AgentRuntime(ControlApi& api, MessageBus& bus, AgentConfig cfg, std::uint64_t seed,
                 const TrafficSchedule* schedule, long long steps_per_hour);

    // Discovers agents (TL_LIST) and their neighbors (TL_NEIGHBORS).
    void init();

    // Called with the SIM_STEP payload: samples vicinity counts, then runs
    // the cycle exchange for every junction whose cycle just completed.
    void handle_step(const nlohmann::json& step_payload);

    const TrafficAgent& agent(const std::string& id) const;
    long long missing_replies() const;

private:
    nlohmann::json call(const std::string& verb, nlohmann::json args);

    ControlApi& api_;
    MessageBus& bus_;
    AgentConfig cfg_;
    const TrafficSchedule* schedule_;
    long long steps_per_hour_;
    std::uint64_t seed_ = 0;
    std::map<std::string, std::unique_ptr<TrafficAgent>> agents_;
    long long next_command_id_ = 1;
};

}  // namespace tls

#endif
