#ifndef TLS_AGENTS_HPP
#define TLS_AGENTS_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tls/errors.hpp"
#include "tls/schedule.hpp"
#include "tls/signal.hpp"

namespace tls {

enum class ActionMode { Uniform, PerPhase };
enum class WeightMode { InverseDistance, ProportionalDistance };

struct AgentConfig {
    double alpha = 0.5;
    double gamma = 0.5;
    double epsilon = 0.0;  // the 0-greedy default
    double own_weight = 0.5;
    double neighbor_weight = 0.5;
    bool period_in_state = false;  // variant B
    ActionMode mode = ActionMode::Uniform;
    WeightMode weighting = WeightMode::InverseDistance;
};

void validate_agent_config(const AgentConfig& cfg);

struct QState {
    std::vector<int> durations;
    std::optional<DayPeriod> period;
    auto operator<=>(const QState&) const = default;
};

// Per-variable-phase deltas; canonical order is lexicographic with -5 < 0 < +5.
struct QAction {
    std::vector<int> deltas;
    auto operator<=>(const QAction&) const = default;
};

class QTable {
public:
    double get(const QState& s, const QAction& a) const;
    void set(const QState& s, const QAction& a, double v);
    std::size_t stored_pairs() const { return values_.size(); }

private:
    std::map<std::pair<QState, QAction>, double> values_;
};

// 9^count states (variant A), times 3 with the day period (variant B).
long long enumerate_states(int variable_phase_count, bool period_in_state);

// Actions keeping every duration within [20, 60], in canonical order.
std::vector<QAction> legal_actions(const std::vector<int>& durations, ActionMode mode);

double own_reward(const std::vector<double>& cycle_samples);

// 0.5*own + 0.5*weighted neighbor average; empty neighbor list degenerates to
// own. Distances must be positive.
double combined_reward(double own, const std::vector<std::pair<double, double>>& neighbors,
                       double own_weight = 0.5, double neighbor_weight = 0.5,
                       WeightMode weighting = WeightMode::InverseDistance);

const QAction& select_action(const QTable& table, const QState& state,
                             const std::vector<QAction>& legal, double epsilon,
                             std::mt19937_64& rng);

double q_update(QTable& table, const QState& s, const QAction& a, double r,
                const QState& s_next, const std::vector<QAction>& legal_next,
                double alpha, double gamma);

enum class Performative { QueryRef, InformRef };

std::string to_string(Performative p);
Performative performative_from_string(const std::string& s);

struct AgentMessage {
    Performative performative = Performative::QueryRef;
    std::string sender;
    std::string receiver;
    std::string conversation;
    std::string content_text = "reward";  // QUERY_REF content
    double reward = 0.0;                  // INFORM_REF content
};

// In-process bus with per-sender FIFO delivery and a full instrumentation log.
class MessageBus {
public:
    void send(AgentMessage msg);
    std::vector<AgentMessage> drain(const std::string& receiver);
    const std::vector<AgentMessage>& log() const { return log_; }
    void clear_log() { log_.clear(); }

private:
    std::vector<AgentMessage> log_;
    std::map<std::string, std::deque<AgentMessage>> inboxes_;
};

// One traffic-light learner. Pure protocol/learning state; the runtime wires
// it to the control API and the bus.
class TrafficAgent {
public:
    TrafficAgent(std::string junction_id, AgentConfig cfg, std::uint64_t seed);

    const std::string& id() const { return id_; }
    void set_neighbors(std::vector<std::pair<std::string, double>> neighbors);
    const std::vector<std::pair<std::string, double>>& neighbors() const {
        return neighbors_;
    }

    void record_sample(double vicinity_count);

    // Cycle completed: fold samples into the own reward and open one
    // QUERY_REF conversation per neighbor.
    std::vector<AgentMessage> begin_cycle_exchange();

    // Answer QUERY_REFs with the most recently completed-cycle own reward.
    // Queries arriving before any completed cycle go unanswered.
    std::vector<AgentMessage> answer_queries(const std::vector<AgentMessage>& queries);

    // Collect INFORM_REF replies, update Q, pick the next action. Returns the
    // variable durations to submit for the next cycle.
    std::vector<int> finish_cycle_exchange(const std::vector<AgentMessage>& informs,
                                           const std::vector<int>& current_durations,
                                           std::optional<DayPeriod> next_period);

    const QTable& table() const { return table_; }
    bool has_reward() const { return has_reward_; }
    double last_own_reward() const { return last_own_reward_; }
    long long missing_replies() const { return missing_replies_; }

private:
    std::string id_;
    AgentConfig cfg_;
    QTable table_;
    std::mt19937_64 rng_;
    std::vector<std::pair<std::string, double>> neighbors_;
    std::vector<double> samples_;
    double last_own_reward_ = 0.0;
    bool has_reward_ = false;
    std::map<std::string, std::string> open_conversations_;  // conversation -> neighbor
    std::uint64_t conv_counter_ = 0;
    std::optional<QState> taken_state_;
    std::optional<QAction> taken_action_;
    long long missing_replies_ = 0;
};

std::uint64_t agent_stream_seed(std::uint64_t run_seed, const std::string& agent_id);

}  // namespace tls

#endif
