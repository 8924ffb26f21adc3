#include "tls/control.hpp"

namespace tls {

using nlohmann::json;

json plan_to_json(const SemaphorePlan& plan) {
    json phases = json::array();
    for (const auto& ph : plan.phases)
        phases.push_back({{"duration", ph.duration},
                          {"colors", colors_to_string(ph.colors)},
                          {"variable", ph.variable}});
    return {{"junction", plan.junction},
            {"phases", phases},
            {"cycle", cycle_length(plan)}};
}

namespace {

std::string require_string(const json& args, const char* key) {
    if (!args.contains(key) || !args[key].is_string())
        throw ApiError{"ARGS", std::string("missing or non-string arg: ") + key};
    return args[key].get<std::string>();
}

std::vector<int> require_int_array(const json& args, const char* key) {
    if (!args.contains(key) || !args[key].is_array())
        throw ApiError{"ARGS", std::string("missing or non-array arg: ") + key};
    std::vector<int> out;
    for (const auto& v : args[key]) {
        if (!v.is_number_integer())
            throw ApiError{"ARGS", std::string("non-integer element in: ") + key};
        out.push_back(v.get<int>());
    }
    return out;
}

}  // namespace

void ControlApi::apply_period_plans() {
    if (!schedule_ || period_durations_.empty()) return;
    const DayPeriod period =
        level_at(*schedule_, engine_.now(), engine_.params().steps_per_hour);
    for (const auto& [tl, per_period] : period_durations_) {
        auto it = per_period.find(period);
        if (it == per_period.end()) continue;
        if (variable_durations(engine_.active_plan(tl)) != it->second)
            engine_.set_pending_durations(tl, it->second);
    }
}

json ControlApi::dispatch(const std::string& verb, const json& args, bool controlling) {
    if (verb == "SIM_STEP") {
        if (!controlling)
            throw ApiError{"STATE", "SIM_STEP is reserved to the controlling session"};
        apply_period_plans();
        StepReport r = engine_.step();
        return {{"step", r.step},
                {"arrived", r.arrived},
                {"completed_cycles", r.completed_cycles}};
    }
    if (verb == "GET_TIME") return {{"step", engine_.now()}};
    if (verb == "TL_LIST") return {{"tls", engine_.network().signalized_ids()}};
    if (verb == "TL_GET_PLAN")
        return plan_to_json(engine_.active_plan(require_string(args, "tl")));
    if (verb == "TL_SET_PLAN_PENDING") {
        const std::string tl = require_string(args, "tl");
        const auto durations = require_int_array(args, "durations");
        try {
            engine_.set_pending_durations(tl, durations);
        } catch (const ConfigError& e) {
            throw ApiError{"PLAN_INVALID", e.what()};
        }
        return {{"ok", true}};
    }
    if (verb == "TL_GET_CYCLE_POS") {
        const std::string tl = require_string(args, "tl");
        return {{"pos", engine_.cycle_position(tl)},
                {"cycle", cycle_length(engine_.active_plan(tl))}};
    }
    if (verb == "TL_COUNT_NEAR")
        return {{"count", engine_.vehicle_count_near(require_string(args, "tl"))}};
    if (verb == "TL_NEIGHBORS") {
        const std::string tl = require_string(args, "tl");
        json out = json::array();
        for (const auto& [nb, dist] : neighbors_of(engine_.network(), tl))
            out.push_back({{"tl", nb}, {"distance", dist}});
        return {{"neighbors", out}};
    }
    if (verb == "VEH_DRAIN_ARRIVED") {
        json out = json::array();
        for (const auto& r : engine_.drain_arrived())
            out.push_back({{"vehicle_id", r.id},
                           {"depart_step", r.depart_step},
                           {"arrive_step", r.arrive_step},
                           {"travel_time", r.travel_time},
                           {"waiting_steps", r.waiting_steps},
                           {"stop_count", r.stop_count},
                           {"avg_wait_per_stop", r.avg_wait_per_stop}});
        return {{"vehicles", out}};
    }
    if (verb == "SET_PERIOD_PLAN") {
        const std::string tl = require_string(args, "tl");
        const DayPeriod period = [&] {
            try {
                return day_period_from_string(require_string(args, "period"));
            } catch (const ConfigError& e) {
                throw ApiError{"ARGS", e.what()};
            }
        }();
        const auto durations = require_int_array(args, "durations");
        try {
            // Validate against the junction's current plan shape.
            with_variable_durations(engine_.active_plan(tl), durations);
        } catch (const ConfigError& e) {
            throw ApiError{"PLAN_INVALID", e.what()};
        }
        period_durations_[tl][period] = durations;
        return {{"ok", true}};
    }
    if (verb == "AGENT_MSG") {
        if (!bus_) throw ApiError{"STATE", "no message bus attached"};
        AgentMessage m;
        try {
            m.performative = performative_from_string(require_string(args, "performative"));
        } catch (const ConfigError& e) {
            throw ApiError{"ARGS", e.what()};
        }
        m.sender = require_string(args, "sender");
        m.receiver = require_string(args, "receiver");
        m.conversation = require_string(args, "conversation");
        if (m.performative == Performative::QueryRef) {
            m.content_text = require_string(args, "content");
        } else {
            if (!args.contains("content") || !args["content"].is_number())
                throw ApiError{"ARGS", "INFORM_REF content must be a number"};
            m.reward = args["content"].get<double>();
        }
        bus_->send(std::move(m));
        return {{"ok", true}};
    }
    throw ApiError{"VERB", "unknown verb: " + verb};
}

json ControlApi::execute(const json& command, bool controlling) {
    std::lock_guard<std::mutex> lock(mu_);
    long long id = 0;
    if (command.contains("id") && command["id"].is_number_integer())
        id = command["id"].get<long long>();
    auto err = [&](const std::string& code, const std::string& message) {
        return json{{"id", id},
                    {"status", "ERR"},
                    {"error", {{"code", code}, {"message", message}}}};
    };
    if (!command.is_object()) return err("PARSE", "command is not a JSON object");
    if (!command.contains("id") || !command["id"].is_number_integer())
        return err("ARGS", "missing or non-integer id");
    if (!command.contains("verb") || !command["verb"].is_string())
        return err("ARGS", "missing or non-string verb");
    json args = command.value("args", json::object());
    if (!args.is_object()) return err("ARGS", "args must be an object");

    try {
        json payload = dispatch(command["verb"].get<std::string>(), args, controlling);
        return {{"id", id}, {"status", "OK"}, {"payload", payload}};
    } catch (const ApiError& e) {
        return err(e.code, e.message);
    } catch (const LookupError& e) {
        return err("UNKNOWN_ID", e.what());
    } catch (const LifecycleError& e) {
        return err("STATE", e.what());
    } catch (const ConfigError& e) {
        return err("ARGS", e.what());
    } catch (const std::exception& e) {
        return err("STATE", e.what());
    }
}

std::string ControlApi::execute_line(const std::string& line, bool controlling) {
    json command = json::parse(line, nullptr, false);
    if (command.is_discarded()) {
        json resp = {{"id", 0},
                     {"status", "ERR"},
                     {"error", {{"code", "PARSE"}, {"message", "malformed JSON line"}}}};
        return resp.dump();
    }
    return execute(command, controlling).dump();
}

}  // namespace tls
