#ifndef TLS_SIM_HPP
#define TLS_SIM_HPP

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tls/metrics.hpp"
#include "tls/network.hpp"
#include "tls/signal.hpp"

namespace tls {

struct SimParams {
    long long steps_per_hour = 20000;
    double vicinity_m = -1.0;       // < 0 means the whole incoming link
    double jam_spacing_m = 7.5;     // bounds link storage
};

struct StepReport {
    long long step = 0;
    std::vector<std::string> arrived;           // vehicle ids, this step
    std::vector<std::string> completed_cycles;  // junction ids whose cycle ended this step
    std::map<std::string, std::size_t> queue_lengths;
};

// Queue-based microscopic engine: vehicles traverse links at free-flow speed,
// join a stop-line FIFO, and discharge on green subject to link capacity and
// downstream storage. Fully deterministic: junctions and links are always
// processed in ascending id order.
class Engine {
public:
    Engine(RoadNetwork net, std::map<std::string, SemaphorePlan> plans,
           SimParams params = {});

    const RoadNetwork& network() const { return net_; }
    const SimParams& params() const { return params_; }

    // Steps executed so far; the next step() processes this step index.
    long long now() const { return clock_; }

    void schedule_vehicle(const std::string& id, Route route, long long depart_step);

    StepReport step();

    // Instantaneous vehicles (traversing + queued) on incoming links of the
    // junction within the vicinity of its stop lines.
    double vehicle_count_near(const std::string& junction_id) const;

    const SemaphorePlan& active_plan(const std::string& junction_id) const;
    // Validated now, applied at the junction's next cycle boundary.
    void set_pending_plan(const std::string& junction_id, SemaphorePlan plan);
    void set_pending_durations(const std::string& junction_id,
                               const std::vector<int>& variable_durations);
    long long cycle_position(const std::string& junction_id) const;
    long long cycle_start(const std::string& junction_id) const;

    std::vector<VehicleRecord> drain_arrived();

    // Conservation bookkeeping.
    std::size_t scheduled_total() const { return scheduled_total_; }
    std::size_t arrived_total() const { return arrived_total_; }
    std::size_t pending_insertions() const { return pending_.size(); }
    std::size_t in_network() const;

    // Marks the run finished; further step() calls raise LifecycleError.
    void close() { closed_ = true; }
    bool closed() const { return closed_; }

private:
    enum class Pos { Traversing, Queued };

    struct Vehicle {
        std::string id;
        Route route;
        std::size_t route_index = 0;
        long long link_entry_step = 0;
        Pos pos = Pos::Traversing;
        long long depart_step = 0;
        std::optional<long long> arrive_step;
        long long waiting_steps = 0;
        int stop_count = 0;
    };

    struct LinkRuntime {
        std::vector<std::string> traversing;  // entry order
        std::deque<std::string> queue;        // stop-line FIFO
        std::size_t storage = 1;
    };

    struct SignalRuntime {
        SemaphorePlan active;
        long long cycle_start = 0;
        std::optional<SemaphorePlan> pending;
    };

    struct PendingInsertion {
        std::string id;
        Route route;
        long long depart_step = 0;
        std::size_t seq = 0;
    };

    ManeuverColor approach_color(const std::string& junction_id,
                                 const SignalRuntime& sr, const std::string& link_id,
                                 long long step) const;
    std::size_t occupancy(const LinkRuntime& lr) const {
        return lr.traversing.size() + lr.queue.size();
    }
    const SignalRuntime& signal(const std::string& junction_id) const;

    RoadNetwork net_;
    SimParams params_;
    long long clock_ = 0;
    bool closed_ = false;
    std::map<std::string, Vehicle> vehicles_;
    std::map<std::string, LinkRuntime> link_rt_;
    std::map<std::string, SignalRuntime> signal_rt_;
    // maneuver index of each incoming link, per signalized junction
    std::map<std::string, std::map<std::string, std::size_t>> approach_index_;
    std::deque<PendingInsertion> pending_;  // sorted by (depart_step, seq)
    std::size_t next_seq_ = 0;
    std::size_t scheduled_total_ = 0;
    std::size_t arrived_total_ = 0;
    std::vector<VehicleRecord> arrived_buffer_;
};

}  // namespace tls

#endif
