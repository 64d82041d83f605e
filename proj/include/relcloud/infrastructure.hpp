#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "relcloud/availability.hpp"
#include "relcloud/errors.hpp"

namespace relcloud {

/// A shared-risk event taking down every node associated with it.
struct SrngEvent {
  std::string id;
  double failure_prob = 0.0;  // pi_i in [0,1); the event is up with 1 - pi_i
};

struct ServerNode {
  std::string id;
  double capacity = 0.0;
  double availability = 1.0;
  std::vector<int> srng;  // indices into Infrastructure::srng_events
};

/// One achievable (availability, delay) operating point between two nodes.
struct FrontierPoint {
  double availability = 1.0;
  double delay = 0.0;
};

/// Substrate view used by the placement algorithms: nodes, shared-risk
/// events, and per-pair communication feasibility frontiers.
struct Infrastructure {
  std::vector<ServerNode> nodes;
  std::vector<SrngEvent> srng_events;
  /// Pareto frontier per unordered node pair, keyed by min_index * N + max_index.
  /// A pair with no entry (or an empty frontier) cannot communicate.
  std::unordered_map<std::int64_t, std::vector<FrontierPoint>> compat;

  int node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return static_cast<int>(i);
    throw ResolutionError("unknown node id '" + id + "'");
  }

  std::int64_t pair_key(int m, int n) const {
    auto lo = static_cast<std::int64_t>(std::min(m, n));
    auto hi = static_cast<std::int64_t>(std::max(m, n));
    return lo * static_cast<std::int64_t>(nodes.size()) + hi;
  }

  void set_frontier(int m, int n, std::vector<FrontierPoint> points) {
    compat[pair_key(m, n)] = std::move(points);
  }

  /// F(m, n, avail_req, delay_req): true when the pair supports a channel at
  /// least this available and at most this slow. Colocation always passes.
  bool pair_feasible(int m, int n, double avail_req, double delay_req) const {
    if (m == n) return true;
    auto it = compat.find(pair_key(m, n));
    if (it == compat.end()) return false;
    for (const FrontierPoint& p : it->second)
      if (p.availability >= avail_req && p.delay <= delay_req) return true;
    return false;
  }

  /// Checks value ranges and id uniqueness; throws ArgumentError on the
  /// first problem found.
  void check() const {
    std::unordered_map<std::string, int> seen;
    for (const auto& e : srng_events) {
      if (!(e.failure_prob >= 0.0) || e.failure_prob >= 1.0)
        throw ArgumentError("srng event '" + e.id +
                            "': failure_prob must lie in [0,1)");
      if (!seen.emplace(e.id, 0).second)
        throw ArgumentError("srng event '" + e.id + "': duplicate id");
    }
    for (const auto& n : nodes) {
      if (!(n.capacity > 0.0))
        throw ArgumentError("node '" + n.id + "': capacity must be positive");
      if (!(n.availability > 0.0) || n.availability > 1.0)
        throw ArgumentError("node '" + n.id +
                            "': availability must lie in (0,1]");
      if (!seen.emplace(n.id, 0).second)
        throw ArgumentError("node '" + n.id +
                            "': id collides with another node or srng event");
      for (int e : n.srng)
        if (e < 0 || static_cast<std::size_t>(e) >= srng_events.size())
          throw ArgumentError("node '" + n.id +
                              "': srng membership index out of range");
    }
    for (const auto& [key, frontier] : compat) {
      (void)key;
      for (const FrontierPoint& p : frontier) {
        if (!(p.availability > 0.0) || p.availability > 1.0)
          throw ArgumentError("compat frontier availability out of (0,1]");
        if (!(p.delay >= 0.0))
          throw ArgumentError("compat frontier delay must be >= 0");
        for (const FrontierPoint& q : frontier)
          if (&p != &q && q.availability >= p.availability &&
              q.delay <= p.delay &&
              (q.availability > p.availability || q.delay < p.delay))
            throw ArgumentError("compat frontier contains a dominated point");
      }
    }
  }

  /// Risk universe over this substrate: node atom i == node index i, srng
  /// event atom == nodes.size() + event index.
  AtomUniverse make_universe() const {
    AtomUniverse u;
    for (const auto& n : nodes)
      u.add_atom(n.id, AtomKind::node, n.availability);
    for (const auto& e : srng_events)
      u.add_atom(e.id, AtomKind::srng_event, 1.0 - e.failure_prob);
    return u;
  }

  /// Availability of one placement group's full risk set: the nodes it uses
  /// plus every shared-risk event those nodes belong to.
  double node_risk_availability(int node) const {
    double p = nodes[node].availability;
    for (int e : nodes[node].srng) p *= 1.0 - srng_events[e].failure_prob;
    return p;
  }
};

}  // namespace relcloud
