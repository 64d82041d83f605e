#pragma once

// Shared helpers for the unit and acceptance suites: compact instance
// builders, independent reference solvers (kept deliberately simple and
// separate from the library's search code), and seeded random generators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "relcloud/baseline_place.hpp"
#include "relcloud/dsr.hpp"
#include "relcloud/exact_place.hpp"
#include "relcloud/infrastructure.hpp"
#include "relcloud/network.hpp"
#include "relcloud/placement.hpp"

namespace testsup {

struct NodeSpec {
  std::string id;
  double capacity;
  double availability;
  std::vector<int> srng = {};
};

inline relcloud::Infrastructure make_infra(
    std::vector<NodeSpec> nodes,
    std::vector<double> srng_failure_probs = {}) {
  relcloud::Infrastructure infra;
  for (std::size_t i = 0; i < srng_failure_probs.size(); ++i)
    infra.srng_events.push_back(
        {"e" + std::to_string(i), srng_failure_probs[i]});
  for (auto& n : nodes)
    infra.nodes.push_back({n.id, n.capacity, n.availability, n.srng});
  return infra;
}

/// Gives every node pair the same single frontier point.
inline void full_mesh_compat(relcloud::Infrastructure& infra,
                             double availability = 1.0, double delay = 1.0) {
  const int n = static_cast<int>(infra.nodes.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      infra.set_frontier(a, b, {{availability, delay}});
}

inline relcloud::PlacementRequest make_request(std::vector<double> demands,
                                               double delta, int H,
                                               double pair_avail = 0.5,
                                               double pair_delay = 1000.0) {
  relcloud::PlacementRequest req;
  const std::size_t k = demands.size();
  for (std::size_t i = 0; i < k; ++i)
    req.vms.push_back({"v" + std::to_string(i + 1), demands[i]});
  req.delay_req.assign(k, std::vector<double>(k, pair_delay));
  req.avail_req.assign(k, std::vector<double>(k, pair_avail));
  for (std::size_t i = 0; i < k; ++i) {
    req.delay_req[i][i] = 1.0;
    req.avail_req[i][i] = 1.0;
  }
  req.delta = delta;
  req.H = H;
  return req;
}

// ---------------------------------------------------------------------------
// Independent placement oracle: full enumeration over group assignments for
// H <= 2, with its own capacity/compatibility/availability arithmetic.
// ---------------------------------------------------------------------------

struct PlacementOracleResult {
  bool accepted = false;
  int used_nodes = 0;
};

namespace detail {

struct OracleConfig {
  std::vector<int> assign;           // k entries, -1 = unplaced
  std::uint32_t vm_mask = 0;         // which VMs the group places
  std::vector<int> nodes;            // distinct nodes, sorted
  bool valid = true;                 // intra-group compat + solo capacity
};

inline double risk_product(const relcloud::Infrastructure& infra,
                           const std::vector<int>& nodes) {
  double p = 1.0;
  std::set<int> events;
  for (int n : nodes) {
    p *= infra.nodes[static_cast<std::size_t>(n)].availability;
    for (int e : infra.nodes[static_cast<std::size_t>(n)].srng)
      events.insert(e);
  }
  for (int e : events)
    p *= 1.0 - infra.srng_events[static_cast<std::size_t>(e)].failure_prob;
  return p;
}

inline std::vector<OracleConfig> oracle_configs(
    const relcloud::Infrastructure& infra,
    const relcloud::PlacementRequest& req, bool allow_holes) {
  const int k = req.k();
  const int N = static_cast<int>(infra.nodes.size());
  const int lowest = allow_holes ? -1 : 0;
  std::vector<OracleConfig> configs;
  std::vector<int> odo(static_cast<std::size_t>(k), lowest);
  while (true) {
    OracleConfig c;
    c.assign = odo;
    for (int v = 0; v < k; ++v)
      if (odo[static_cast<std::size_t>(v)] >= 0) {
        c.vm_mask |= 1u << v;
        c.nodes.push_back(odo[static_cast<std::size_t>(v)]);
      }
    std::sort(c.nodes.begin(), c.nodes.end());
    c.nodes.erase(std::unique(c.nodes.begin(), c.nodes.end()), c.nodes.end());
    // solo capacity
    for (int n : c.nodes) {
      double load = 0.0;
      for (int v = 0; v < k; ++v)
        if (odo[static_cast<std::size_t>(v)] == n)
          load += req.vms[static_cast<std::size_t>(v)].demand;
      if (load > infra.nodes[static_cast<std::size_t>(n)].capacity)
        c.valid = false;
    }
    // intra-group compatibility
    for (int a = 0; a < k && c.valid; ++a)
      for (int b = a + 1; b < k && c.valid; ++b) {
        int m = odo[static_cast<std::size_t>(a)];
        int n = odo[static_cast<std::size_t>(b)];
        if (m < 0 || n < 0 || m == n) continue;
        if (!infra.pair_feasible(m, n,
                                 req.avail_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                                 req.delay_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]))
          c.valid = false;
      }
    if (c.valid) configs.push_back(std::move(c));
    // odometer over {lowest, .., N-1}^k
    int i = 0;
    for (; i < k; ++i) {
      if (odo[static_cast<std::size_t>(i)] + 1 < N) {
        ++odo[static_cast<std::size_t>(i)];
        break;
      }
      odo[static_cast<std::size_t>(i)] = lowest;
    }
    if (i == k) break;
  }
  return configs;
}

inline bool oracle_pair_feasible(const relcloud::Infrastructure& infra,
                                 const relcloud::PlacementRequest& req,
                                 const OracleConfig& g1,
                                 const OracleConfig& g2,
                                 relcloud::FailureModel model, int* used_out) {
  const int k = req.k();
  const std::uint32_t all = (k == 32) ? 0xffffffffu : ((1u << k) - 1);
  if (((g1.vm_mask | g2.vm_mask) & all) != all) return false;

  // combined capacity: each (vm, node) pair charged once
  std::map<int, double> load;
  for (int v = 0; v < k; ++v) {
    std::set<int> hosts;
    if (g1.assign[static_cast<std::size_t>(v)] >= 0)
      hosts.insert(g1.assign[static_cast<std::size_t>(v)]);
    if (g2.assign[static_cast<std::size_t>(v)] >= 0)
      hosts.insert(g2.assign[static_cast<std::size_t>(v)]);
    for (int n : hosts)
      load[n] += req.vms[static_cast<std::size_t>(v)].demand;
  }
  for (auto& [n, l] : load)
    if (l > infra.nodes[static_cast<std::size_t>(n)].capacity) return false;

  if (model == relcloud::FailureModel::multi) {
    // a group either places the whole service or is unused
    if (!g1.nodes.empty() && g1.vm_mask != all) return false;
    if (!g2.nodes.empty() && g2.vm_mask != all) return false;
    double avail;
    if (g1.nodes.empty() && g2.nodes.empty()) return false;
    if (g1.nodes.empty() || g2.nodes.empty()) {
      const OracleConfig& g = g1.nodes.empty() ? g2 : g1;
      avail = risk_product(infra, g.nodes);
    } else {
      std::vector<int> uni = g1.nodes;
      uni.insert(uni.end(), g2.nodes.begin(), g2.nodes.end());
      std::sort(uni.begin(), uni.end());
      uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
      avail = risk_product(infra, g1.nodes) + risk_product(infra, g2.nodes) -
              risk_product(infra, uni);
    }
    if (avail < req.delta) return false;
  } else {
    // group 1 must place everything
    if (g1.vm_mask != all) return false;
    for (int v = 0; v < k; ++v) {
      std::set<int> hosts;
      if (g1.assign[static_cast<std::size_t>(v)] >= 0)
        hosts.insert(g1.assign[static_cast<std::size_t>(v)]);
      if (g2.assign[static_cast<std::size_t>(v)] >= 0)
        hosts.insert(g2.assign[static_cast<std::size_t>(v)]);
      if (hosts.size() >= 2) continue;
      if (infra.nodes[static_cast<std::size_t>(*hosts.begin())].availability <
          req.delta)
        return false;
    }
  }

  std::set<int> used(g1.nodes.begin(), g1.nodes.end());
  used.insert(g2.nodes.begin(), g2.nodes.end());
  *used_out = static_cast<int>(used.size());
  return true;
}

}  // namespace detail

/// Brute-force minimal-node placement for H <= 2 (the acceptance scale).
/// Under the group failure model every group places the whole service, so
/// pairs range over complete configurations (unordered, sharing nodes is
/// fine). Under the single-node model the first group is complete and the
/// backup may place any subset, so ordered pairs are enumerated.
inline PlacementOracleResult enumerate_placement(
    const relcloud::Infrastructure& infra,
    const relcloud::PlacementRequest& req,
    relcloud::FailureModel model = relcloud::FailureModel::multi) {
  auto complete = detail::oracle_configs(infra, req, false);
  detail::OracleConfig empty;
  empty.assign.assign(static_cast<std::size_t>(req.k()), -1);

  PlacementOracleResult best;
  auto consider = [&](const detail::OracleConfig& a,
                      const detail::OracleConfig& b) {
    int used = 0;
    if (!detail::oracle_pair_feasible(infra, req, a, b, model, &used)) return;
    if (!best.accepted || used < best.used_nodes) {
      best.accepted = true;
      best.used_nodes = used;
    }
  };
  for (const auto& c : complete) consider(c, empty);
  if (req.H >= 2) {
    if (model == relcloud::FailureModel::multi) {
      for (std::size_t i = 0; i < complete.size(); ++i)
        for (std::size_t j = i; j < complete.size(); ++j)
          consider(complete[i], complete[j]);
    } else {
      auto partial = detail::oracle_configs(infra, req, true);
      for (const auto& g1 : complete)
        for (const auto& g2 : partial)
          consider(g1, g2);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random placement instances (small scale, oracle-friendly)
// ---------------------------------------------------------------------------

struct RandomInstance {
  relcloud::Infrastructure infra;
  relcloud::PlacementRequest req;
};

inline double pick(std::mt19937_64& rng, std::initializer_list<double> xs) {
  auto it = xs.begin();
  std::advance(it, static_cast<long>(rng() % xs.size()));
  return *it;
}

inline RandomInstance random_placement_instance(std::mt19937_64& rng,
                                                int max_nodes = 8,
                                                int max_vms = 3,
                                                int max_groups = 2,
                                                bool with_srng = true) {
  RandomInstance inst;
  int N = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - 1));
  int E = with_srng && (rng() % 2 == 0)
              ? 1 + static_cast<int>(rng() % 3) : 0;
  std::vector<double> event_probs;
  for (int e = 0; e < E; ++e)
    event_probs.push_back(pick(rng, {0.001, 0.01, 0.05}));

  std::vector<NodeSpec> nodes;
  for (int n = 0; n < N; ++n) {
    NodeSpec s;
    s.id = "n" + std::to_string(n);
    s.capacity = 100.0 + 10.0 * static_cast<double>(rng() % 11);
    s.availability = pick(rng, {0.9, 0.99, 0.999, 0.9999});
    for (int e = 0; e < E; ++e)
      if (rng() % 3 == 0) s.srng.push_back(e);
    nodes.push_back(std::move(s));
  }
  inst.infra = make_infra(std::move(nodes), std::move(event_probs));
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b) {
      if (rng() % 8 == 0) continue;  // unreachable pair
      std::vector<relcloud::FrontierPoint> frontier;
      double d1 = 10.0 + static_cast<double>(rng() % 11);
      frontier.push_back({0.999, d1});
      double d2 = 20.0 + static_cast<double>(rng() % 11);
      if (rng() % 2 == 0 && d2 > d1) frontier.push_back({0.9999, d2});
      inst.infra.set_frontier(a, b, std::move(frontier));
    }

  int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_vms));
  std::vector<double> demands;
  for (int v = 0; v < k; ++v)
    demands.push_back(40.0 + 10.0 * static_cast<double>(rng() % 10));
  double delta = pick(rng, {0.9, 0.99, 0.999, 0.9999});
  int H = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_groups));
  inst.req = make_request(std::move(demands), delta, H);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      double avail = pick(rng, {0.999, 0.9999});
      double delay = 15.0 + static_cast<double>(rng() % 11);
      inst.req.avail_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = avail;
      inst.req.avail_req[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = avail;
      inst.req.delay_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = delay;
      inst.req.delay_req[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = delay;
    }
  inst.req.alpha = 1.0;
  return inst;
}

// ---------------------------------------------------------------------------
// Network fixtures and reference algorithms
// ---------------------------------------------------------------------------

struct LinkSpec {
  std::string id;
  int u;
  int v;
  double availability;
  double delay;
  std::vector<int> srlg = {};
};

inline relcloud::Network make_network(int nodes, std::vector<LinkSpec> links,
                                      std::vector<double> srlg_probs = {}) {
  relcloud::Network net;
  for (int i = 0; i < nodes; ++i)
    net.node_ids.push_back("n" + std::to_string(i));
  for (std::size_t i = 0; i < srlg_probs.size(); ++i)
    net.srlg_events.push_back({"g" + std::to_string(i), srlg_probs[i]});
  for (auto& l : links)
    net.links.push_back({l.id, l.u, l.v, l.availability, l.delay, l.srlg});
  return net;
}

/// Two node-disjoint two-hop routes: the upper one over 0.99 links with
/// delay 12 each, the lower one over 0.9 links with delay 5 each.
inline relcloud::Network diamond_network() {
  return make_network(4, {{"su", 0, 1, 0.99, 12.0},
                          {"ut", 1, 3, 0.99, 12.0},
                          {"sl", 0, 2, 0.9, 5.0},
                          {"lt", 2, 3, 0.9, 5.0}});
}

/// Both s-t routes share the first link, so fully link-disjoint strategies
/// can never combine them.
inline relcloud::Network shared_first_hop_network() {
  return make_network(4, {{"u", 0, 1, 0.99, 5.0},
                          {"w", 1, 3, 0.9, 5.0},
                          {"x", 1, 2, 0.95, 5.0},
                          {"v", 2, 3, 0.9, 5.0}});
}

inline relcloud::Network random_connected_network(std::mt19937_64& rng,
                                                  int max_nodes = 8,
                                                  bool with_srlg = true) {
  int N = 4 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - 3));
  int E = with_srlg && (rng() % 2 == 0)
              ? 1 + static_cast<int>(rng() % 3) : 0;
  std::vector<double> probs;
  for (int e = 0; e < E; ++e) probs.push_back(pick(rng, {0.001, 0.01, 0.05}));

  std::vector<LinkSpec> links;
  auto add_link = [&](int u, int v) {
    LinkSpec l;
    l.id = "l" + std::to_string(links.size());
    l.u = u;
    l.v = v;
    l.availability = pick(rng, {0.9, 0.99, 0.999, 0.9999});
    l.delay = 5.0 + static_cast<double>(rng() % 21);
    if (E > 0 && rng() % 4 == 0)
      l.srlg.push_back(static_cast<int>(rng() % static_cast<unsigned>(E)));
    links.push_back(std::move(l));
  };
  for (int i = 1; i < N; ++i)
    add_link(i, static_cast<int>(rng() % static_cast<unsigned>(i)));
  int extras = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < extras; ++i) {
    int u = static_cast<int>(rng() % static_cast<unsigned>(N));
    int v = static_cast<int>(rng() % static_cast<unsigned>(N));
    if (u == v) continue;
    add_link(u, v);
  }
  return make_network(N, std::move(links), std::move(probs));
}

/// Checks that an accepted routing answer is a real answer: every path is a
/// node-simple s-t walk over existing links within the delay budget, and
/// the reported availability matches an independent recomputation.
inline void require_route_sound(const relcloud::Network& net,
                                const relcloud::RouteRequest& req,
                                const relcloud::RouteOutcome& out) {
  if (out.paths.empty()) return;
  if (static_cast<int>(out.paths.size()) > req.w)
    throw std::runtime_error("route: more paths than allowed");
  for (const auto& path : out.paths) {
    if (path.empty()) throw std::runtime_error("route: empty path");
    double delay = 0.0;
    int at = req.s;
    std::set<int> seen{req.s};
    for (int l : path) {
      const auto& link = net.links.at(static_cast<std::size_t>(l));
      int next = link.u == at ? link.v : link.u;
      if (link.u != at && link.v != at)
        throw std::runtime_error("route: disconnected path");
      if (!seen.insert(next).second)
        throw std::runtime_error("route: path revisits a node");
      delay += link.delay;
      at = next;
    }
    if (at != req.t) throw std::runtime_error("route: path misses t");
    if (delay > req.max_delay + 1e-9)
      throw std::runtime_error("route: path over the delay budget");
  }
  relcloud::AtomUniverse u = net.make_universe();
  double avail = relcloud::path_set_availability(u, net, out.paths);
  if (std::abs(avail - out.availability) > 1e-12)
    throw std::runtime_error("route: reported availability is off");
}

/// Reference for the single-link-failure baseline: prune weak links, then
/// Bellman-Ford on delay.
inline std::optional<double> pruned_min_delay(const relcloud::Network& net,
                                              const relcloud::RouteRequest& req) {
  const int n = net.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n), inf);
  dist[static_cast<std::size_t>(req.s)] = 0.0;
  for (int round = 0; round + 1 < n; ++round)
    for (const auto& l : net.links) {
      if (l.availability < req.eta) continue;
      auto du = dist[static_cast<std::size_t>(l.u)];
      auto dv = dist[static_cast<std::size_t>(l.v)];
      if (du + l.delay < dist[static_cast<std::size_t>(l.v)])
        dist[static_cast<std::size_t>(l.v)] = du + l.delay;
      if (dv + l.delay < dist[static_cast<std::size_t>(l.u)])
        dist[static_cast<std::size_t>(l.u)] = dv + l.delay;
    }
  double d = dist[static_cast<std::size_t>(req.t)];
  if (d <= req.max_delay) return d;
  return std::nullopt;
}

}  // namespace testsup
