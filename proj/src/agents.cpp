#include "tls/agents.hpp"

#include <algorithm>
#include <cmath>

namespace tls {

void validate_agent_config(const AgentConfig& cfg) {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(cfg.alpha) || !unit(cfg.gamma) || !unit(cfg.epsilon))
        throw ConfigError("alpha, gamma, epsilon must lie in [0, 1]");
    if (!unit(cfg.own_weight) || !unit(cfg.neighbor_weight) ||
        std::abs(cfg.own_weight + cfg.neighbor_weight - 1.0) > 1e-12)
        throw ConfigError("own_weight + neighbor_weight must equal 1");
}

double QTable::get(const QState& s, const QAction& a) const {
    auto it = values_.find({s, a});
    return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(const QState& s, const QAction& a, double v) { values_[{s, a}] = v; }

long long enumerate_states(int variable_phase_count, bool period_in_state) {
    if (variable_phase_count != 2 && variable_phase_count != 3)
        throw ConfigError("variable phase count must be 2 or 3");
    long long n = 1;
    for (int i = 0; i < variable_phase_count; ++i) n *= 9;  // {20,25,...,60}
    return period_in_state ? n * 3 : n;
}

std::vector<QAction> legal_actions(const std::vector<int>& durations, ActionMode mode) {
    if (durations.empty()) throw ContractError("no variable durations");
    auto fits = [&](std::size_t i, int d) {
        const int nd = durations[i] + d;
        return nd >= kMinVariableDuration && nd <= kMaxVariableDuration;
    };
    static const int kDeltas[3] = {-5, 0, 5};
    std::vector<QAction> out;
    if (mode == ActionMode::Uniform) {
        for (int d : kDeltas) {
            bool ok = true;
            for (std::size_t i = 0; i < durations.size(); ++i) ok = ok && fits(i, d);
            if (ok) out.push_back(QAction{std::vector<int>(durations.size(), d)});
        }
    } else {
        std::vector<int> deltas(durations.size(), -5);
        std::vector<std::size_t> idx(durations.size(), 0);
        while (true) {
            bool ok = true;
            for (std::size_t i = 0; i < durations.size(); ++i)
                ok = ok && fits(i, deltas[i]);
            if (ok) out.push_back(QAction{deltas});
            std::size_t i = durations.size();
            while (i > 0) {
                --i;
                if (idx[i] < 2) {
                    ++idx[i];
                    deltas[i] = kDeltas[idx[i]];
                    break;
                }
                idx[i] = 0;
                deltas[i] = kDeltas[0];
                if (i == 0) return out;
            }
        }
    }
    return out;
}

double own_reward(const std::vector<double>& cycle_samples) {
    if (cycle_samples.empty()) throw LifecycleError("own_reward over empty sample set");
    double sum = 0.0;
    for (double s : cycle_samples) sum += s;
    return -(sum / static_cast<double>(cycle_samples.size()));
}

double combined_reward(double own, const std::vector<std::pair<double, double>>& neighbors,
                       double own_weight, double neighbor_weight, WeightMode weighting) {
    if (neighbors.empty()) return own;
    double wsum = 0.0;
    for (const auto& [r, d] : neighbors) {
        if (d <= 0.0) throw ContractError("neighbor distance must be positive");
        wsum += weighting == WeightMode::InverseDistance ? 1.0 / d : d;
    }
    double avg = 0.0;
    for (const auto& [r, d] : neighbors) {
        const double w = (weighting == WeightMode::InverseDistance ? 1.0 / d : d) / wsum;
        avg += w * r;
    }
    return own_weight * own + neighbor_weight * avg;
}

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

const QAction& select_action(const QTable& table, const QState& state,
                             const std::vector<QAction>& legal, double epsilon,
                             std::mt19937_64& rng) {
    if (legal.empty()) throw ContractError("empty legal action set");
    if (epsilon > 0.0 && uniform01(rng) < epsilon)
        return legal[static_cast<std::size_t>(rng() % legal.size())];
    std::size_t best = 0;
    double best_q = table.get(state, legal[0]);
    for (std::size_t i = 1; i < legal.size(); ++i) {
        const double q = table.get(state, legal[i]);
        if (q > best_q) {
            best = i;
            best_q = q;
        }
    }
    return legal[best];
}

double q_update(QTable& table, const QState& s, const QAction& a, double r,
                const QState& s_next, const std::vector<QAction>& legal_next,
                double alpha, double gamma) {
    if (legal_next.empty()) throw ContractError("empty next legal action set");
    double max_next = table.get(s_next, legal_next[0]);
    for (std::size_t i = 1; i < legal_next.size(); ++i)
        max_next = std::max(max_next, table.get(s_next, legal_next[i]));
    const double old = table.get(s, a);
    const double updated = old + alpha * (r + gamma * max_next - old);
    table.set(s, a, updated);
    return updated;
}

std::string to_string(Performative p) {
    return p == Performative::QueryRef ? "QUERY_REF" : "INFORM_REF";
}

Performative performative_from_string(const std::string& s) {
    if (s == "QUERY_REF") return Performative::QueryRef;
    if (s == "INFORM_REF") return Performative::InformRef;
    throw ConfigError("unknown performative: " + s);
}

void MessageBus::send(AgentMessage msg) {
    log_.push_back(msg);
    inboxes_[msg.receiver].push_back(std::move(msg));
}

std::vector<AgentMessage> MessageBus::drain(const std::string& receiver) {
    auto it = inboxes_.find(receiver);
    if (it == inboxes_.end()) return {};
    std::vector<AgentMessage> out(it->second.begin(), it->second.end());
    it->second.clear();
    return out;
}

TrafficAgent::TrafficAgent(std::string junction_id, AgentConfig cfg, std::uint64_t seed)
    : id_(std::move(junction_id)), cfg_(cfg), rng_(seed) {
    validate_agent_config(cfg_);
}

void TrafficAgent::set_neighbors(std::vector<std::pair<std::string, double>> neighbors) {
    neighbors_ = std::move(neighbors);
}

void TrafficAgent::record_sample(double vicinity_count) {
    samples_.push_back(vicinity_count);
}

std::vector<AgentMessage> TrafficAgent::begin_cycle_exchange() {
    last_own_reward_ = own_reward(samples_);
    has_reward_ = true;
    samples_.clear();
    open_conversations_.clear();
    std::vector<AgentMessage> queries;
    for (const auto& [nb, dist] : neighbors_) {
        AgentMessage m;
        m.performative = Performative::QueryRef;
        m.sender = id_;
        m.receiver = nb;
        m.conversation = id_ + "#" + std::to_string(conv_counter_++);
        m.content_text = "reward";
        open_conversations_[m.conversation] = nb;
        queries.push_back(std::move(m));
    }
    return queries;
}

std::vector<AgentMessage> TrafficAgent::answer_queries(
    const std::vector<AgentMessage>& queries) {
    std::vector<AgentMessage> replies;
    for (const auto& q : queries) {
        if (q.performative != Performative::QueryRef || q.content_text != "reward")
            continue;
        if (!has_reward_) continue;  // nothing to report yet
        AgentMessage m;
        m.performative = Performative::InformRef;
        m.sender = id_;
        m.receiver = q.sender;
        m.conversation = q.conversation;
        m.reward = last_own_reward_;
        replies.push_back(std::move(m));
    }
    return replies;
}

std::vector<int> TrafficAgent::finish_cycle_exchange(
    const std::vector<AgentMessage>& informs, const std::vector<int>& current_durations,
    std::optional<DayPeriod> next_period) {
    std::map<std::string, double> replied;  // neighbor -> reward
    for (const auto& m : informs) {
        if (m.performative != Performative::InformRef) continue;
        auto it = open_conversations_.find(m.conversation);
        if (it == open_conversations_.end()) continue;
        replied[it->second] = m.reward;
    }
    std::vector<std::pair<double, double>> responders;
    for (const auto& [nb, dist] : neighbors_) {
        auto it = replied.find(nb);
        if (it != replied.end()) responders.push_back({it->second, dist});
        else ++missing_replies_;  // absent this cycle, weights renormalize
    }
    const double reward = combined_reward(last_own_reward_, responders, cfg_.own_weight,
                                          cfg_.neighbor_weight, cfg_.weighting);

    QState s_next{current_durations,
                  cfg_.period_in_state ? next_period : std::nullopt};
    const auto legal = legal_actions(current_durations, cfg_.mode);
    if (taken_state_)
        q_update(table_, *taken_state_, *taken_action_, reward, s_next, legal,
                 cfg_.alpha, cfg_.gamma);

    const QAction& a = select_action(table_, s_next, legal, cfg_.epsilon, rng_);
    taken_state_ = s_next;
    taken_action_ = a;
    open_conversations_.clear();

    std::vector<int> durations = current_durations;
    for (std::size_t i = 0; i < durations.size(); ++i) durations[i] += a.deltas[i];
    return durations;
}

std::uint64_t agent_stream_seed(std::uint64_t run_seed, const std::string& agent_id) {
    // FNV-1a over the id, mixed with the run seed
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : agent_id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h ^ (run_seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
}

}  // namespace tls
