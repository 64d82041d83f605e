#pragma once

#include <algorithm>
#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "relcloud/availability.hpp"
#include "relcloud/errors.hpp"
#include "relcloud/infrastructure.hpp"

namespace relcloud {

/// An undirected network link. Parallel links between the same endpoints are
/// allowed; `srlg` lists the shared-risk groups the link belongs to.
struct NetLink {
  std::string id;
  int u = 0;
  int v = 0;
  double availability = 1.0;
  double delay = 0.0;
  std::vector<int> srlg;  // indices into Network::srlg_events
};

/// Routing substrate: an undirected (multi)graph whose links carry an
/// availability, a delay, and optional shared-risk memberships.
struct Network {
  std::vector<std::string> node_ids;
  std::vector<NetLink> links;
  std::vector<SrngEvent> srlg_events;

  int node_count() const { return static_cast<int>(node_ids.size()); }

  int node_index(const std::string& id) const {
    for (std::size_t i = 0; i < node_ids.size(); ++i)
      if (node_ids[i] == id) return static_cast<int>(i);
    throw ResolutionError("unknown node id '" + id + "'");
  }

  void check() const {
    if (node_ids.size() < 2)
      throw ArgumentError("network: needs at least two nodes");
    std::set<std::string> seen;
    for (const auto& id : node_ids)
      if (!seen.insert(id).second)
        throw ArgumentError("node '" + id + "': duplicate id");
    for (const auto& e : srlg_events) {
      if (!(e.failure_prob >= 0.0) || e.failure_prob >= 1.0)
        throw ArgumentError("srlg event '" + e.id +
                            "': failure_prob must lie in [0,1)");
      if (!seen.insert(e.id).second)
        throw ArgumentError("srlg event '" + e.id +
                            "': id collides with another id");
    }
    const int n = node_count();
    for (const auto& l : links) {
      if (l.u < 0 || l.u >= n || l.v < 0 || l.v >= n || l.u == l.v)
        throw ArgumentError("link '" + l.id + "': bad endpoints");
      if (!(l.availability > 0.0) || l.availability > 1.0)
        throw ArgumentError("link '" + l.id +
                            "': availability must lie in (0,1]");
      if (!(l.delay >= 0.0))
        throw ArgumentError("link '" + l.id + "': delay must be >= 0");
      if (!seen.insert(l.id).second)
        throw ArgumentError("link '" + l.id + "': id collides with another id");
      for (int g : l.srlg)
        if (g < 0 || static_cast<std::size_t>(g) >= srlg_events.size())
          throw ArgumentError("link '" + l.id +
                              "': srlg membership index out of range");
    }
  }

  /// Risk universe: link atom i == link index i, shared-risk event atom ==
  /// links.size() + event index.
  AtomUniverse make_universe() const {
    AtomUniverse u;
    for (const auto& l : links)
      u.add_atom(l.id, AtomKind::link, l.availability);
    for (const auto& e : srlg_events)
      u.add_atom(e.id, AtomKind::srng_event, 1.0 - e.failure_prob);
    return u;
  }
};

/// Risk atoms of one path: its links plus every shared-risk event those
/// links belong to.
inline AtomGroup path_atom_group(const Network& net,
                                 const std::vector<int>& path_links) {
  std::vector<AtomId> atoms;
  const auto base = static_cast<AtomId>(net.links.size());
  for (int l : path_links) {
    atoms.push_back(static_cast<AtomId>(l));
    for (int g : net.links[static_cast<std::size_t>(l)].srlg)
      atoms.push_back(base + static_cast<AtomId>(g));
  }
  return AtomGroup(std::move(atoms));
}

/// Availability of a set of paths: probability that at least one of them
/// has every link (and shared-risk group) up.
inline double path_set_availability(
    const AtomUniverse& u, const Network& net,
    const std::vector<std::vector<int>>& paths) {
  std::vector<AtomGroup> groups;
  for (const auto& p : paths)
    if (!p.empty()) groups.push_back(path_atom_group(net, p));
  if (groups.empty()) return 0.0;
  return multi_group_availability(u, groups);
}

/// One connection request: route from s to t with end-to-end availability at
/// least eta, per-path delay at most max_delay, using up to w paths.
struct RouteRequest {
  int s = 0;
  int t = 0;
  double eta = 0.999;
  double max_delay = 0.0;
  int w = 1;

  void check(const Network& net) const {
    const int n = net.node_count();
    if (s < 0 || s >= n || t < 0 || t >= n)
      throw ArgumentError("route request: endpoint index out of range");
    if (s == t) throw ArgumentError("route request: s and t must differ");
    if (!(eta > 0.0) || eta > 1.0)
      throw ArgumentError("route request: eta must lie in (0,1]");
    if (!(max_delay > 0.0))
      throw ArgumentError("route request: max_delay must be positive");
    if (w < 1) throw ArgumentError("route request: w must be >= 1");
  }
};

struct RouteOutcome {
  bool accepted = false;
  /// Paths as ordered lists of link indices; empty when nothing was found.
  std::vector<std::vector<int>> paths;
  /// Availability of `paths`; the best reachable value even when rejected.
  double availability = 0.0;
  std::chrono::microseconds runtime{0};
};

}  // namespace relcloud
