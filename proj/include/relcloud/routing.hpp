#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "relcloud/errors.hpp"
#include "relcloud/network.hpp"

namespace relcloud {

/// One arc of the layered search graph. Layer copies keep their base link
/// (undirected); bridges are directed t-of-layer-i to s-of-layer-i+1 hops
/// with availability 1 and delay 0, marked by base_link == -1.
struct LayeredLink {
  int from = 0;
  int to = 0;
  int base_link = -1;
  double availability = 1.0;
  double delay = 0.0;
};

/// w stacked copies of the network joined by w-1 bridges: a walk from s in
/// the first layer to t in any layer spells out one path per layer crossed.
struct LayeredGraph {
  int layers = 1;
  int base_nodes = 0;
  std::vector<LayeredLink> links;

  int node_count() const { return layers * base_nodes; }
  int layered_id(int layer, int base_node) const {
    return layer * base_nodes + base_node;
  }
};

inline LayeredGraph build_layered_graph(const Network& net, int s, int t,
                                        int w) {
  LayeredGraph lg;
  lg.layers = w;
  lg.base_nodes = net.node_count();
  for (int layer = 0; layer < w; ++layer)
    for (std::size_t l = 0; l < net.links.size(); ++l) {
      const NetLink& link = net.links[l];
      lg.links.push_back({lg.layered_id(layer, link.u),
                          lg.layered_id(layer, link.v), static_cast<int>(l),
                          link.availability, link.delay});
    }
  for (int layer = 0; layer + 1 < w; ++layer)
    lg.links.push_back(
        {lg.layered_id(layer, t), lg.layered_id(layer + 1, s), -1, 1.0, 0.0});
  return lg;
}

namespace detail {

struct RouteLabel {
  int layer = 0;
  int node = 0;  // base node index
  double avail = 0.0;
  double delay = 0.0;
  double bound = 1.0;
  std::uint64_t visited = 0;       // base nodes of the current segment
  std::uint64_t events = 0;        // shared-risk events across all segments
  std::vector<std::vector<int>> done;  // completed segments, traversal order
  std::vector<int> cur;                // current segment, traversal order
  std::uint64_t seq = 0;
  bool dead = false;
};

struct RouteSearchResult {
  double best_avail = 0.0;
  std::vector<std::vector<int>> best_paths;
  std::uint64_t stores = 0;
};

/// Canonical key of a label's link structure: segment order and traversal
/// order are irrelevant to everything that can still happen, so two labels
/// at the same position with the same key are interchangeable.
inline std::string structure_key(int node,
                                 const std::vector<std::vector<int>>& done,
                                 const std::vector<int>& cur) {
  std::vector<std::vector<int>> segs = done;
  for (auto& s : segs) std::sort(s.begin(), s.end());
  std::sort(segs.begin(), segs.end());
  std::string key;
  key.reserve(16 + 4 * (segs.size() + 1));
  auto put = [&key](int x) {
    key.append(reinterpret_cast<const char*>(&x), sizeof(x));
  };
  put(node);
  for (const auto& s : segs) {
    put(-2);
    for (int l : s) put(l);
  }
  put(-3);
  std::vector<int> c = cur;
  std::sort(c.begin(), c.end());
  for (int l : c) put(l);
  return key;
}

/// Best-first label search over the layered graph. Exact when label_cap is
/// unbounded; with a finite cap each layered node retains at most that many
/// labels (highest availability first, ties by lower delay), which is the
/// capped heuristic. Acceptance thresholds play no role here: the search
/// returns the maximum-availability delay-feasible path set it can prove.
inline RouteSearchResult route_label_search(const Network& net,
                                            const RouteRequest& req,
                                            std::size_t label_cap) {
  net.check();
  req.check(net);
  const int N = net.node_count();
  const int E = static_cast<int>(net.srlg_events.size());
  if (N > 64)
    throw SizeError("route: more than 64 nodes is not supported");

  LayeredGraph lg = build_layered_graph(net, req.s, req.t, req.w);
  // adjacency over layered nodes; base copies are usable in both directions
  std::vector<std::vector<std::pair<int, int>>> adj(
      static_cast<std::size_t>(lg.node_count()));  // (layered link, to)
  for (std::size_t i = 0; i < lg.links.size(); ++i) {
    const LayeredLink& ll = lg.links[i];
    adj[static_cast<std::size_t>(ll.from)].push_back(
        {static_cast<int>(i), ll.to});
    if (ll.base_link >= 0)
      adj[static_cast<std::size_t>(ll.to)].push_back(
          {static_cast<int>(i), ll.from});
  }

  AtomUniverse u = net.make_universe();
  double b_max = 0.0;
  for (const auto& l : net.links) b_max = std::max(b_max, l.availability);

  // dominance between single-segment labels is only sound when both touch
  // exactly the same shared-risk events, tracked as a bitmask
  const bool use_dominance = req.w == 1 && E <= 64;

  std::vector<RouteLabel> pool;
  std::unordered_set<std::string> seen;
  std::vector<std::vector<std::size_t>> retained(
      static_cast<std::size_t>(lg.node_count()));
  RouteSearchResult result;
  std::uint64_t next_seq = 0;

  auto bound_of = [&](const RouteLabel& lab) {
    int remaining = req.w - 1 - lab.layer + (lab.cur.empty() ? 1 : 0);
    return 1.0 - (1.0 - lab.avail) * std::pow(1.0 - b_max, remaining);
  };

  struct HeapEntry {
    double bound;
    double avail;
    double delay;
    std::uint64_t seq;
    std::size_t idx;
    bool operator<(const HeapEntry& o) const {
      if (bound != o.bound) return bound < o.bound;
      if (avail != o.avail) return avail < o.avail;
      if (delay != o.delay) return delay > o.delay;
      return seq > o.seq;
    }
  };
  std::priority_queue<HeapEntry> heap;

  auto offer = [&](RouteLabel&& lab) {
    std::string key = structure_key(lab.node, lab.done, lab.cur);
    if (!seen.insert(std::move(key)).second) return;

    const int pos = lg.layered_id(lab.layer, lab.node);
    auto& slot = retained[static_cast<std::size_t>(pos)];
    if (use_dominance) {
      for (std::size_t i = 0; i < slot.size();) {
        RouteLabel& other = pool[slot[i]];
        if (other.dead) {
          slot[i] = slot.back();
          slot.pop_back();
          continue;
        }
        if (other.events == lab.events && other.avail >= lab.avail &&
            other.delay <= lab.delay)
          return;  // an at-least-as-good twin already exists
        if (other.events == lab.events && lab.avail >= other.avail &&
            lab.delay <= other.delay) {
          other.dead = true;
          slot[i] = slot.back();
          slot.pop_back();
          continue;
        }
        ++i;
      }
    }
    if (slot.size() >= label_cap) {
      // evict the weakest retained label if the new one beats it
      std::size_t worst = 0;
      for (std::size_t i = 1; i < slot.size(); ++i) {
        const RouteLabel& a = pool[slot[i]];
        const RouteLabel& b = pool[slot[worst]];
        if (a.avail < b.avail ||
            (a.avail == b.avail && a.delay > b.delay))
          worst = i;
      }
      const RouteLabel& w_lab = pool[slot[worst]];
      if (lab.avail < w_lab.avail ||
          (lab.avail == w_lab.avail && lab.delay >= w_lab.delay))
        return;
      pool[slot[worst]].dead = true;
      slot[worst] = slot.back();
      slot.pop_back();
    }

    lab.seq = next_seq++;
    lab.bound = bound_of(lab);
    pool.push_back(std::move(lab));
    slot.push_back(pool.size() - 1);
    ++result.stores;
    const RouteLabel& stored = pool.back();
    heap.push({stored.bound, stored.avail, stored.delay, stored.seq,
               pool.size() - 1});
  };

  RouteLabel start;
  start.node = req.s;
  start.visited = std::uint64_t{1} << req.s;
  offer(std::move(start));

  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    if (pool[top.idx].dead) continue;
    RouteLabel lab = pool[top.idx];  // expansion may grow the pool

    if (result.best_avail > 0.0 && lab.bound <= result.best_avail) break;

    if (lab.node == req.t && !lab.cur.empty()) {
      if (lab.avail > result.best_avail) {
        result.best_avail = lab.avail;
        result.best_paths = lab.done;
        result.best_paths.push_back(lab.cur);
      }
    }

    const int pos = lg.layered_id(lab.layer, lab.node);
    for (auto [lidx, to] : adj[static_cast<std::size_t>(pos)]) {
      const LayeredLink& ll = lg.links[static_cast<std::size_t>(lidx)];
      if (ll.base_link < 0) {
        // bridge: close the current segment and restart from s above
        RouteLabel nxt;
        nxt.layer = lab.layer + 1;
        nxt.node = req.s;
        nxt.avail = lab.avail;
        nxt.delay = 0.0;
        nxt.visited = std::uint64_t{1} << req.s;
        nxt.events = lab.events;
        nxt.done = lab.done;
        nxt.done.push_back(lab.cur);
        offer(std::move(nxt));
        continue;
      }
      if (lab.node == req.t) continue;  // segments end at t, never pass it
      int to_base = to % N;
      if (lab.visited & (std::uint64_t{1} << to_base)) continue;
      double nd = lab.delay + ll.delay;
      if (nd > req.max_delay) continue;

      RouteLabel nxt;
      nxt.layer = lab.layer;
      nxt.node = to_base;
      nxt.delay = nd;
      nxt.visited = lab.visited | (std::uint64_t{1} << to_base);
      nxt.events = lab.events;
      if (E <= 64)
        for (int g : net.links[static_cast<std::size_t>(ll.base_link)].srlg)
          nxt.events |= std::uint64_t{1} << g;
      nxt.done = lab.done;
      nxt.cur = lab.cur;
      nxt.cur.push_back(ll.base_link);

      std::vector<std::vector<int>> all = nxt.done;
      all.push_back(nxt.cur);
      nxt.avail = path_set_availability(u, net, all);
      offer(std::move(nxt));
    }
  }
  return result;
}

}  // namespace detail

/// Maximum-availability routing: finds the delay-feasible path set (at most
/// w paths) of highest availability and accepts when it reaches eta. The
/// reported availability is that maximum even on rejection.
inline RouteOutcome route_exact(const Network& net, const RouteRequest& req) {
  auto start = std::chrono::steady_clock::now();
  auto res = detail::route_label_search(
      net, req, std::numeric_limits<std::size_t>::max());
  RouteOutcome out;
  out.availability = res.best_avail;
  out.paths = std::move(res.best_paths);
  out.accepted = res.best_avail >= req.eta;
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

/// Capped variant of route_exact: each layered node keeps at most
/// max_labels labels (highest availability, ties by lower delay), trading
/// optimality for a hard bound on work. With an unbounded cap it degenerates
/// to the exact search.
inline RouteOutcome tadra(const Network& net, const RouteRequest& req,
                          std::size_t max_labels) {
  if (max_labels == 0)
    throw ArgumentError("tadra: max_labels must be >= 1");
  auto start = std::chrono::steady_clock::now();
  auto res = detail::route_label_search(net, req, max_labels);
  RouteOutcome out;
  out.availability = res.best_avail;
  out.paths = std::move(res.best_paths);
  out.accepted = res.best_avail >= req.eta;
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

/// Round-based heuristic: repeatedly finds the most available delay-feasible
/// single path on the remaining graph, removes its links, and accumulates
/// the found paths until they are jointly available enough (or w rounds
/// pass). The paths are fully link-disjoint by construction, so overlap
/// never helps it the way it can help the exact search.
inline RouteOutcome seq_tamcra(const Network& net, const RouteRequest& req) {
  auto start = std::chrono::steady_clock::now();
  net.check();
  req.check(net);
  AtomUniverse u = net.make_universe();

  RouteOutcome out;
  std::vector<char> pruned(net.links.size(), 0);
  for (int round = 0; round < req.w && !out.accepted; ++round) {
    Network work;
    work.node_ids = net.node_ids;
    work.srlg_events = net.srlg_events;
    std::vector<int> orig_of;
    for (std::size_t l = 0; l < net.links.size(); ++l)
      if (!pruned[l]) {
        work.links.push_back(net.links[l]);
        orig_of.push_back(static_cast<int>(l));
      }
    if (work.links.empty()) break;

    RouteRequest single = req;
    single.w = 1;
    single.eta = 1.0;  // threshold plays no role in the inner search
    auto res = detail::route_label_search(
        work, single, std::numeric_limits<std::size_t>::max());
    if (res.best_paths.empty()) break;

    std::vector<int> path;
    for (int l : res.best_paths[0]) {
      path.push_back(orig_of[static_cast<std::size_t>(l)]);
      pruned[static_cast<std::size_t>(orig_of[static_cast<std::size_t>(l)])] =
          1;
    }
    out.paths.push_back(std::move(path));
    out.availability = path_set_availability(u, net, out.paths);
    out.accepted = out.availability >= req.eta;
  }
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

/// Single-path baseline: drop every link whose own availability is below
/// eta, then take the minimum-delay path over what remains and accept when
/// it is fast enough. Only meaningful for w == 1 requests.
inline RouteOutcome route_single_link_failure(const Network& net,
                                              const RouteRequest& req) {
  auto start = std::chrono::steady_clock::now();
  net.check();
  req.check(net);
  if (req.w != 1)
    throw ArgumentError("route_single_link_failure: only w == 1 requests");

  const int N = net.node_count();
  std::vector<std::vector<std::pair<int, int>>> adj(
      static_cast<std::size_t>(N));
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    if (net.links[l].availability < req.eta) continue;
    adj[static_cast<std::size_t>(net.links[l].u)].push_back(
        {static_cast<int>(l), net.links[l].v});
    adj[static_cast<std::size_t>(net.links[l].v)].push_back(
        {static_cast<int>(l), net.links[l].u});
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(N), inf);
  std::vector<int> via_link(static_cast<std::size_t>(N), -1);
  std::vector<int> via_node(static_cast<std::size_t>(N), -1);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[static_cast<std::size_t>(req.s)] = 0.0;
  heap.push({0.0, req.s});
  while (!heap.empty()) {
    auto [d, n] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(n)]) continue;
    for (auto [l, to] : adj[static_cast<std::size_t>(n)]) {
      double nd = d + net.links[static_cast<std::size_t>(l)].delay;
      if (nd < dist[static_cast<std::size_t>(to)]) {
        dist[static_cast<std::size_t>(to)] = nd;
        via_link[static_cast<std::size_t>(to)] = l;
        via_node[static_cast<std::size_t>(to)] = n;
        heap.push({nd, to});
      }
    }
  }

  RouteOutcome out;
  if (dist[static_cast<std::size_t>(req.t)] <= req.max_delay) {
    std::vector<int> path;
    for (int n = req.t; n != req.s; n = via_node[static_cast<std::size_t>(n)])
      path.push_back(via_link[static_cast<std::size_t>(n)]);
    std::reverse(path.begin(), path.end());
    AtomUniverse u = net.make_universe();
    out.paths.push_back(std::move(path));
    out.availability = path_set_availability(u, net, out.paths);
    out.accepted = true;
  }
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

/// Exhaustive reference: enumerates every simple delay-feasible path, then
/// every subset of at most w of them, and returns the most available
/// subset. Guarded to small graphs.
inline RouteOutcome brute_force_route(const Network& net,
                                      const RouteRequest& req) {
  auto start = std::chrono::steady_clock::now();
  net.check();
  req.check(net);
  if (net.node_count() > 10)
    throw SizeError("brute_force_route: more than 10 nodes");

  std::vector<std::vector<std::pair<int, int>>> adj(
      static_cast<std::size_t>(net.node_count()));
  for (std::size_t l = 0; l < net.links.size(); ++l) {
    adj[static_cast<std::size_t>(net.links[l].u)].push_back(
        {static_cast<int>(l), net.links[l].v});
    adj[static_cast<std::size_t>(net.links[l].v)].push_back(
        {static_cast<int>(l), net.links[l].u});
  }

  std::vector<std::vector<int>> paths;
  std::vector<int> walk;
  std::uint64_t visited = std::uint64_t{1} << req.s;
  auto dfs = [&](auto&& self, int node, double delay) -> void {
    if (node == req.t) {
      paths.push_back(walk);
      return;
    }
    for (auto [l, to] : adj[static_cast<std::size_t>(node)]) {
      if (visited & (std::uint64_t{1} << to)) continue;
      double nd = delay + net.links[static_cast<std::size_t>(l)].delay;
      if (nd > req.max_delay) continue;
      visited |= std::uint64_t{1} << to;
      walk.push_back(l);
      self(self, to, nd);
      walk.pop_back();
      visited &= ~(std::uint64_t{1} << to);
    }
  };
  dfs(dfs, req.s, 0.0);

  AtomUniverse u = net.make_universe();
  RouteOutcome out;
  std::vector<std::vector<int>> chosen;
  auto consider = [&]() {
    if (chosen.empty()) return;
    double avail = path_set_availability(u, net, chosen);
    if (avail > out.availability) {
      out.availability = avail;
      out.paths = chosen;
    }
  };
  auto pick = [&](auto&& self, std::size_t from, int slots) -> void {
    consider();
    if (slots == 0) return;
    for (std::size_t i = from; i < paths.size(); ++i) {
      chosen.push_back(paths[i]);
      self(self, i + 1, slots - 1);
      chosen.pop_back();
    }
  };
  pick(pick, 0, req.w);

  out.accepted = out.availability >= req.eta;
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace relcloud
