#include "tls/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tls {

Engine::Engine(RoadNetwork net, std::map<std::string, SemaphorePlan> plans,
               SimParams params)
    : net_(std::move(net)), params_(params) {
    if (params_.steps_per_hour < 1) throw ConfigError("steps_per_hour < 1");
    for (const auto& lid : net_.link_ids()) {
        const Link& l = net_.link(lid);
        LinkRuntime lr;
        lr.storage = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(l.length / params_.jam_spacing_m)));
        link_rt_.emplace(lid, std::move(lr));
    }
    for (auto& [jid, plan] : plans) {
        const Junction& j = net_.junction(jid);
        if (!j.signalized) throw ConfigError("plan for unsignalized junction: " + jid);
        validate_plan(plan);
        const auto& in = net_.incoming(jid);
        if (plan.phases.front().colors.size() != in.size())
            throw ConfigError("plan maneuver count != incoming link count: " + jid);
        for (std::size_t m = 0; m < in.size(); ++m) approach_index_[jid][in[m]] = m;
        signal_rt_.emplace(jid, SignalRuntime{std::move(plan), 0, std::nullopt});
    }
    for (const auto& jid : net_.signalized_ids())
        if (!signal_rt_.count(jid))
            throw ConfigError("signalized junction without plan: " + jid);
}

const Engine::SignalRuntime& Engine::signal(const std::string& junction_id) const {
    auto it = signal_rt_.find(junction_id);
    if (it == signal_rt_.end()) throw LookupError("no signal at junction: " + junction_id);
    return it->second;
}

void Engine::schedule_vehicle(const std::string& id, Route route, long long depart_step) {
    if (vehicles_.count(id)) throw ConfigError("duplicate vehicle id: " + id);
    net_.validate_route(route);
    if (depart_step < clock_) throw ContractError("depart_step in the past");
    PendingInsertion ins{id, std::move(route), depart_step, next_seq_++};
    auto at = std::lower_bound(pending_.begin(), pending_.end(), ins,
                               [](const PendingInsertion& a, const PendingInsertion& b) {
                                   if (a.depart_step != b.depart_step)
                                       return a.depart_step < b.depart_step;
                                   return a.seq < b.seq;
                               });
    pending_.insert(at, std::move(ins));
    ++scheduled_total_;
}

ManeuverColor Engine::approach_color(const std::string& junction_id,
                                     const SignalRuntime& sr, const std::string& link_id,
                                     long long step) const {
    const int pos = static_cast<int>((step - sr.cycle_start) % cycle_length(sr.active));
    const std::size_t phase = current_phase(sr.active, pos);
    const std::size_t m = approach_index_.at(junction_id).at(link_id);
    return sr.active.phases[phase].colors[m];
}

StepReport Engine::step() {
    if (closed_) throw LifecycleError("stepping a finished simulation");
    const long long now = clock_;
    StepReport report;
    report.step = now;

    // Cycle boundaries: swap in pending plans before anything moves.
    for (auto& [jid, sr] : signal_rt_) {
        if (now - sr.cycle_start == cycle_length(sr.active)) {
            if (sr.pending) {
                sr.active = std::move(*sr.pending);
                sr.pending.reset();
            }
            sr.cycle_start = now;
        }
    }

    // Insertions due now (or delayed from earlier steps). A blocked origin
    // link blocks later insertions on that same link only.
    std::set<std::string> blocked;
    for (auto it = pending_.begin(); it != pending_.end() && it->depart_step <= now;) {
        const std::string& origin = it->route.links.front();
        LinkRuntime& lr = link_rt_.at(origin);
        if (!blocked.count(origin) && occupancy(lr) < lr.storage) {
            Vehicle v;
            v.id = it->id;
            v.route = std::move(it->route);
            v.link_entry_step = now;
            v.depart_step = it->depart_step;
            lr.traversing.push_back(v.id);
            vehicles_.emplace(v.id, std::move(v));
            it = pending_.erase(it);
        } else {
            blocked.insert(origin);
            ++it;
        }
    }

    // Traversal completions join the stop-line queue in entry order.
    for (auto& [lid, lr] : link_rt_) {
        const int fft = net_.link(lid).free_flow_time;
        while (!lr.traversing.empty()) {
            Vehicle& v = vehicles_.at(lr.traversing.front());
            if (now - v.link_entry_step < fft) break;
            v.pos = Pos::Queued;
            ++v.stop_count;
            lr.queue.push_back(v.id);
            lr.traversing.erase(lr.traversing.begin());
        }
    }

    // Green discharge, junctions then links in ascending id order.
    for (const auto& jid : net_.junction_ids()) {
        const bool sig = net_.junction(jid).signalized;
        const SignalRuntime* sr = sig ? &signal_rt_.at(jid) : nullptr;
        for (const auto& lid : net_.incoming(jid)) {
            if (sig && approach_color(jid, *sr, lid, now) != ManeuverColor::Green)
                continue;
            LinkRuntime& lr = link_rt_.at(lid);
            for (int n = 0; n < net_.link(lid).capacity && !lr.queue.empty(); ++n) {
                const std::string vid = lr.queue.front();
                Vehicle& v = vehicles_.at(vid);
                if (v.route_index + 1 == v.route.links.size()) {
                    v.arrive_step = now;
                    VehicleRecord rec;
                    rec.id = v.id;
                    rec.depart_step = v.depart_step;
                    rec.arrive_step = now;
                    rec.travel_time = now - v.depart_step;
                    rec.waiting_steps = v.waiting_steps;
                    rec.stop_count = v.stop_count;
                    rec.avg_wait_per_stop = static_cast<double>(v.waiting_steps) /
                                            std::max(v.stop_count, 1);
                    report.arrived.push_back(v.id);
                    arrived_buffer_.push_back(std::move(rec));
                    ++arrived_total_;
                    lr.queue.pop_front();
                    vehicles_.erase(vid);
                } else {
                    const std::string& next = v.route.links[v.route_index + 1];
                    LinkRuntime& nx = link_rt_.at(next);
                    if (occupancy(nx) >= nx.storage) break;  // spillback, FIFO holds
                    ++v.route_index;
                    v.link_entry_step = now;
                    v.pos = Pos::Traversing;
                    nx.traversing.push_back(v.id);
                    lr.queue.pop_front();
                }
            }
        }
    }

    for (auto& [id, v] : vehicles_)
        if (v.pos == Pos::Queued) ++v.waiting_steps;

    for (const auto& [jid, sr] : signal_rt_)
        if (now + 1 - sr.cycle_start == cycle_length(sr.active))
            report.completed_cycles.push_back(jid);

    for (const auto& [lid, lr] : link_rt_) report.queue_lengths[lid] = lr.queue.size();

    clock_ = now + 1;
    return report;
}

double Engine::vehicle_count_near(const std::string& junction_id) const {
    if (!net_.junction(junction_id).signalized)
        throw LookupError("junction not signalized: " + junction_id);
    double count = 0.0;
    for (const auto& lid : net_.incoming(junction_id)) {
        const Link& l = net_.link(lid);
        const LinkRuntime& lr = link_rt_.at(lid);
        count += static_cast<double>(lr.queue.size());
        if (params_.vicinity_m < 0.0 || params_.vicinity_m >= l.length) {
            count += static_cast<double>(lr.traversing.size());
        } else {
            for (const auto& vid : lr.traversing) {
                const Vehicle& v = vehicles_.at(vid);
                const long long elapsed = std::min<long long>(clock_ - v.link_entry_step,
                                                              l.free_flow_time);
                const double remaining =
                    l.length * static_cast<double>(l.free_flow_time - elapsed) /
                    static_cast<double>(l.free_flow_time);
                if (remaining <= params_.vicinity_m) count += 1.0;
            }
        }
    }
    return count;
}

const SemaphorePlan& Engine::active_plan(const std::string& junction_id) const {
    return signal(junction_id).active;
}

void Engine::set_pending_plan(const std::string& junction_id, SemaphorePlan plan) {
    auto it = signal_rt_.find(junction_id);
    if (it == signal_rt_.end()) throw LookupError("no signal at junction: " + junction_id);
    validate_plan(plan);
    if (plan.phases.front().colors.size() !=
        it->second.active.phases.front().colors.size())
        throw ConfigError("pending plan changes maneuver count: " + junction_id);
    it->second.pending = std::move(plan);
}

void Engine::set_pending_durations(const std::string& junction_id,
                                   const std::vector<int>& variable_durations) {
    auto it = signal_rt_.find(junction_id);
    if (it == signal_rt_.end()) throw LookupError("no signal at junction: " + junction_id);
    const SemaphorePlan& base =
        it->second.pending ? *it->second.pending : it->second.active;
    it->second.pending = with_variable_durations(base, variable_durations);
}

long long Engine::cycle_position(const std::string& junction_id) const {
    const SignalRuntime& sr = signal(junction_id);
    return (clock_ - sr.cycle_start) % cycle_length(sr.active);
}

long long Engine::cycle_start(const std::string& junction_id) const {
    return signal(junction_id).cycle_start;
}

std::vector<VehicleRecord> Engine::drain_arrived() {
    std::vector<VehicleRecord> out;
    out.swap(arrived_buffer_);
    return out;
}

std::size_t Engine::in_network() const { return vehicles_.size(); }

}  // namespace tls
