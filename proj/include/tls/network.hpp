#ifndef TLS_NETWORK_HPP
#define TLS_NETWORK_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tls/errors.hpp"

namespace tls {

struct Junction {
    std::string id;
    int row = 0;
    int col = 0;
    bool signalized = false;
};

struct Link {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;       // meters
    int free_flow_time = 1;    // whole steps
    int capacity = 1;          // vehicles discharged per green step
};

// Ordered list of link ids; consecutive links share their junction.
struct Route {
    std::vector<std::string> links;
};

class RoadNetwork {
public:
    void add_junction(Junction j);
    void add_link(Link l);

    bool has_junction(const std::string& id) const { return junction_index_.count(id) != 0; }
    bool has_link(const std::string& id) const { return link_index_.count(id) != 0; }
    const Junction& junction(const std::string& id) const;
    const Link& link(const std::string& id) const;

    // Link ids, sorted ascending.
    const std::vector<std::string>& incoming(const std::string& junction_id) const;
    const std::vector<std::string>& outgoing(const std::string& junction_id) const;

    std::vector<std::string> junction_ids() const;   // sorted
    std::vector<std::string> signalized_ids() const; // sorted
    std::vector<std::string> link_ids() const;       // sorted
    std::size_t junction_count() const { return junctions_.size(); }
    std::size_t link_count() const { return links_.size(); }

    void validate_route(const Route& r) const;

private:
    std::map<std::string, Junction> junctions_;
    std::map<std::string, Link> links_;
    std::map<std::string, std::size_t> junction_index_;  // existence only
    std::map<std::string, std::size_t> link_index_;
    std::map<std::string, std::vector<std::string>> incoming_;
    std::map<std::string, std::vector<std::string>> outgoing_;
};

// Manhattan-style grid: rows x cols signalized interior junctions, opposing
// directed links between orthogonal neighbors, and one unsignalized
// source/sink junction per exposed boundary edge.
RoadNetwork build_grid(int rows, int cols, double link_length, int free_flow_time,
                       int capacity);

// Signalized junctions directly linked to j, with the shortest direct link
// length as distance. Sorted by junction id.
std::vector<std::pair<std::string, double>> neighbors_of(const RoadNetwork& net,
                                                         const std::string& j);

// Minimal total length; ties broken by lexicographically smallest link-id
// sequence.
Route shortest_route(const RoadNetwork& net, const std::string& origin,
                     const std::string& dest);

}  // namespace tls

#endif
