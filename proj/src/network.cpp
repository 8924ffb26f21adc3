#include "tls/network.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace tls {

void RoadNetwork::add_junction(Junction j) {
    if (junctions_.count(j.id))
        throw ConfigError("duplicate junction id: " + j.id);
    junction_index_[j.id] = junctions_.size();
    incoming_[j.id];
    outgoing_[j.id];
    junctions_.emplace(j.id, std::move(j));
}

void RoadNetwork::add_link(Link l) {
    if (links_.count(l.id))
        throw ConfigError("duplicate link id: " + l.id);
    if (l.from == l.to)
        throw ConfigError("self-loop link: " + l.id);
    if (l.length <= 0.0)
        throw ConfigError("non-positive link length: " + l.id);
    if (l.free_flow_time < 1)
        throw ConfigError("free_flow_time < 1: " + l.id);
    if (l.capacity < 1)
        throw ConfigError("capacity < 1: " + l.id);
    if (!junctions_.count(l.from) || !junctions_.count(l.to))
        throw ConfigError("link endpoint missing: " + l.id);
    auto& in = incoming_[l.to];
    in.insert(std::lower_bound(in.begin(), in.end(), l.id), l.id);
    auto& out = outgoing_[l.from];
    out.insert(std::lower_bound(out.begin(), out.end(), l.id), l.id);
    link_index_[l.id] = links_.size();
    links_.emplace(l.id, std::move(l));
}

const Junction& RoadNetwork::junction(const std::string& id) const {
    auto it = junctions_.find(id);
    if (it == junctions_.end()) throw LookupError("unknown junction: " + id);
    return it->second;
}

const Link& RoadNetwork::link(const std::string& id) const {
    auto it = links_.find(id);
    if (it == links_.end()) throw LookupError("unknown link: " + id);
    return it->second;
}

const std::vector<std::string>& RoadNetwork::incoming(const std::string& junction_id) const {
    auto it = incoming_.find(junction_id);
    if (it == incoming_.end()) throw LookupError("unknown junction: " + junction_id);
    return it->second;
}

const std::vector<std::string>& RoadNetwork::outgoing(const std::string& junction_id) const {
    auto it = outgoing_.find(junction_id);
    if (it == outgoing_.end()) throw LookupError("unknown junction: " + junction_id);
    return it->second;
}

std::vector<std::string> RoadNetwork::junction_ids() const {
    std::vector<std::string> ids;
    ids.reserve(junctions_.size());
    for (const auto& [id, j] : junctions_) ids.push_back(id);
    return ids;
}

std::vector<std::string> RoadNetwork::signalized_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, j] : junctions_)
        if (j.signalized) ids.push_back(id);
    return ids;
}

std::vector<std::string> RoadNetwork::link_ids() const {
    std::vector<std::string> ids;
    ids.reserve(links_.size());
    for (const auto& [id, l] : links_) ids.push_back(id);
    return ids;
}

void RoadNetwork::validate_route(const Route& r) const {
    if (r.links.empty()) throw ConfigError("empty route");
    for (std::size_t i = 0; i < r.links.size(); ++i) {
        const Link& l = link(r.links[i]);
        if (i + 1 < r.links.size() && l.to != link(r.links[i + 1]).from)
            throw ConfigError("route not contiguous at link " + l.id);
    }
}

namespace {

std::string link_id(const std::string& from, const std::string& to) {
    return from + ">" + to;
}

}  // namespace

RoadNetwork build_grid(int rows, int cols, double link_length, int free_flow_time,
                       int capacity) {
    if (rows < 1 || cols < 1)
        throw ConfigError("grid dimensions must be >= 1");

    RoadNetwork net;
    auto interior_id = [](int r, int c) {
        return "J_" + std::to_string(r) + "_" + std::to_string(c);
    };

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            net.add_junction({interior_id(r, c), r, c, true});

    auto pair_links = [&](const std::string& a, const std::string& b) {
        net.add_link({link_id(a, b), a, b, link_length, free_flow_time, capacity});
        net.add_link({link_id(b, a), b, a, link_length, free_flow_time, capacity});
    };

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) pair_links(interior_id(r, c), interior_id(r, c + 1));
            if (r + 1 < rows) pair_links(interior_id(r, c), interior_id(r + 1, c));
        }

    // One source/sink per exposed boundary edge.
    for (int c = 0; c < cols; ++c) {
        std::string n = "B_N_" + std::to_string(c);
        net.add_junction({n, -1, c, false});
        pair_links(n, interior_id(0, c));
        std::string s = "B_S_" + std::to_string(c);
        net.add_junction({s, rows, c, false});
        pair_links(s, interior_id(rows - 1, c));
    }
    for (int r = 0; r < rows; ++r) {
        std::string w = "B_W_" + std::to_string(r);
        net.add_junction({w, r, -1, false});
        pair_links(w, interior_id(r, 0));
        std::string e = "B_E_" + std::to_string(r);
        net.add_junction({e, r, cols, false});
        pair_links(e, interior_id(r, cols - 1));
    }
    return net;
}

std::vector<std::pair<std::string, double>> neighbors_of(const RoadNetwork& net,
                                                         const std::string& j) {
    const Junction& jn = net.junction(j);
    if (!jn.signalized) throw LookupError("junction not signalized: " + j);

    std::map<std::string, double> best;
    auto consider = [&](const Link& l, const std::string& other) {
        const Junction& o = net.junction(other);
        if (!o.signalized) return;
        auto it = best.find(other);
        if (it == best.end() || l.length < it->second) best[other] = l.length;
    };
    for (const auto& lid : net.incoming(j)) consider(net.link(lid), net.link(lid).from);
    for (const auto& lid : net.outgoing(j)) consider(net.link(lid), net.link(lid).to);

    return {best.begin(), best.end()};
}

Route shortest_route(const RoadNetwork& net, const std::string& origin,
                     const std::string& dest) {
    if (origin == dest) throw ContractError("origin equals destination");
    net.junction(origin);
    net.junction(dest);

    // Dijkstra keyed on (distance, link-id sequence) so equal-length ties pick
    // the lexicographically smallest path.
    using Entry = std::tuple<double, std::vector<std::string>, std::string>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        return std::get<1>(a) > std::get<1>(b);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> pq(cmp);
    std::map<std::string, bool> done;
    pq.push({0.0, {}, origin});

    while (!pq.empty()) {
        auto [dist, path, node] = pq.top();
        pq.pop();
        if (done[node]) continue;
        done[node] = true;
        if (node == dest) return Route{path};
        for (const auto& lid : net.outgoing(node)) {
            const Link& l = net.link(lid);
            if (done[l.to]) continue;
            auto next = path;
            next.push_back(lid);
            pq.push({dist + l.length, std::move(next), l.to});
        }
    }
    throw RoutingError("no route from " + origin + " to " + dest);
}

}  // namespace tls
