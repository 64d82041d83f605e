#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "relcloud/placement.hpp"

namespace relcloud {

namespace detail {

/// Nodes hosting each VM in any of the given groups; a node that already
/// hosts a VM is ineligible to host the same VM again in a later group.
inline std::vector<std::vector<char>> prior_hosts(
    const Infrastructure& infra, int k,
    const std::vector<std::vector<int>>& groups) {
  std::vector<std::vector<char>> on(
      static_cast<std::size_t>(k),
      std::vector<char>(infra.nodes.size(), 0));
  for (const auto& g : groups)
    for (int v = 0; v < k; ++v)
      if (g[static_cast<std::size_t>(v)] >= 0)
        on[static_cast<std::size_t>(v)]
          [static_cast<std::size_t>(g[static_cast<std::size_t>(v)])] = 1;
  return on;
}

/// Capacity left per node once the given groups' placements are charged
/// (each distinct (vm, node) pair once).
inline std::vector<double> residual_capacity(
    const Infrastructure& infra, const PlacementRequest& req,
    const std::vector<std::vector<int>>& groups) {
  PlacementAssignment asg{groups};
  std::vector<double> used = capacity_consumption(infra, req, asg);
  std::vector<double> residual(infra.nodes.size());
  for (std::size_t n = 0; n < infra.nodes.size(); ++n)
    residual[n] = infra.nodes[n].capacity - used[n];
  return residual;
}

}  // namespace detail

/// Builds one placement group greedily. The construction is restarted from
/// every VM as the seed and under three deterministic tie-break flavors;
/// each run hosts the current VM on the feasible node of highest effective
/// availability (a node already used by this group counts as fully
/// available; when shared-risk events exist, a fresh node is discounted by
/// the events it would newly drag in), then moves to the unplaced VM with
/// the tightest delay-to-availability ratio against the placed ones. Equal
/// scores are common when availabilities come from a small value set, so
/// the restarts differ in how they break them: first node index, largest
/// remaining capacity, or last node index. Returns the best complete group
/// found, or the best partial one (most VMs, then availability) when no
/// run completes.
inline std::vector<int> dsr_place(
    const Infrastructure& infra, const PlacementRequest& req,
    const std::vector<std::vector<int>>& prior_groups) {
  const int k = req.k();
  const int N = static_cast<int>(infra.nodes.size());
  const int E = static_cast<int>(infra.srng_events.size());
  auto ineligible = detail::prior_hosts(infra, k, prior_groups);
  auto base_residual = detail::residual_capacity(infra, req, prior_groups);
  AtomUniverse u = infra.make_universe();

  struct Run {
    std::vector<int> assign;
    int covered = 0;
    double avail = 0.0;
    int used = 0;
    bool complete = false;
  };
  std::vector<Run> runs;

  for (int flavor = 0; flavor < 3; ++flavor)
  for (int seed = 0; seed < k; ++seed) {
    std::vector<int> assign(static_cast<std::size_t>(k), -1);
    std::vector<double> residual = base_residual;
    std::vector<char> counted(static_cast<std::size_t>(E), 0);
    std::vector<char> node_used(static_cast<std::size_t>(N), 0);
    std::vector<char> placed(static_cast<std::size_t>(k), 0);
    int covered = 0;
    int vx = seed;

    while (true) {
      int best = -1;
      double best_score = -1.0;
      const double demand = req.vms[static_cast<std::size_t>(vx)].demand;
      for (int n = 0; n < N; ++n) {
        if (residual[static_cast<std::size_t>(n)] < demand) continue;
        if (ineligible[static_cast<std::size_t>(vx)][static_cast<std::size_t>(n)])
          continue;
        if (!detail::compatible_with_group(infra, req, assign, vx, n)) continue;
        double score;
        if (node_used[static_cast<std::size_t>(n)]) {
          score = 1.0;  // already paid for in this group
        } else {
          score = infra.nodes[static_cast<std::size_t>(n)].availability;
          for (int e : infra.nodes[static_cast<std::size_t>(n)].srng)
            if (!counted[static_cast<std::size_t>(e)])
              score *= 1.0 - infra.srng_events[static_cast<std::size_t>(e)].failure_prob;
        }
        bool better = score > best_score;
        if (score == best_score && best >= 0) {
          // prefer a node already carrying part of this group, then break
          // by the flavor of this restart
          bool cand_used = node_used[static_cast<std::size_t>(n)];
          bool best_used = node_used[static_cast<std::size_t>(best)];
          if (cand_used != best_used) {
            better = cand_used;
          } else if (flavor == 1) {
            better = residual[static_cast<std::size_t>(n)] >
                     residual[static_cast<std::size_t>(best)];
          } else if (flavor == 2) {
            better = true;  // the last equal-score node wins
          }
        }
        if (better) { best = n; best_score = score; }
      }
      if (best < 0) break;  // this run ends with a partial group

      assign[static_cast<std::size_t>(vx)] = best;
      residual[static_cast<std::size_t>(best)] -= demand;
      node_used[static_cast<std::size_t>(best)] = 1;
      for (int e : infra.nodes[static_cast<std::size_t>(best)].srng)
        counted[static_cast<std::size_t>(e)] = 1;
      placed[static_cast<std::size_t>(vx)] = 1;
      ++covered;
      if (covered == k) break;

      // next VM: smallest delay-requirement-to-availability ratio against
      // any VM already in the group
      int next = -1;
      double best_chi = 0.0;
      for (int v = 0; v < k; ++v) {
        if (placed[static_cast<std::size_t>(v)]) continue;
        double chi = std::numeric_limits<double>::infinity();
        for (int w = 0; w < k; ++w) {
          if (!placed[static_cast<std::size_t>(w)]) continue;
          double c = req.delay_req[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] *
                     req.alpha /
                     req.avail_req[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)];
          chi = std::min(chi, c);
        }
        if (next < 0 || chi < best_chi) { next = v; best_chi = chi; }
      }
      vx = next;
    }

    Run r;
    r.assign = std::move(assign);
    r.covered = covered;
    r.complete = covered == k;
    AtomGroup atoms = group_atom_set(infra, r.assign);
    r.avail = atoms.empty() ? 0.0 : atom_set_availability(u, atoms);
    r.used = static_cast<int>(
        std::count(node_used.begin(), node_used.end(), 1));
    runs.push_back(std::move(r));
  }

  const Run* pick = nullptr;
  for (const Run& r : runs) {
    if (!pick) { pick = &r; continue; }
    if (r.complete != pick->complete) {
      if (r.complete) pick = &r;
      continue;
    }
    if (!r.complete && r.covered != pick->covered) {
      if (r.covered > pick->covered) pick = &r;
      continue;
    }
    if (r.avail != pick->avail) {
      if (r.avail > pick->avail) pick = &r;
      continue;
    }
    if (r.used < pick->used) pick = &r;  // earliest seed wins remaining ties
  }
  return pick->assign;
}

/// Node-count reduction pass: visits the used nodes from least to most
/// reliable (shared-risk discounts included) and tries to evict each one by
/// rehosting its VMs, per group, onto that group's other used nodes (largest
/// residual capacity first, heaviest VMs first). An eviction sticks only
/// if the reduced assignment still validates end to end.
inline std::vector<std::vector<int>> partially_dsr_place(
    const Infrastructure& infra, const PlacementRequest& req,
    std::vector<std::vector<int>> groups,
    FailureModel model = FailureModel::multi) {
  const int k = req.k();
  std::vector<int> order = used_nodes_of(PlacementAssignment{groups});
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ra = infra.node_risk_availability(a);
    double rb = infra.node_risk_availability(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });

  for (int evict : order) {
    bool hosts_something = false;
    for (const auto& g : groups)
      for (int n : g)
        if (n == evict) { hosts_something = true; break; }
    if (!hosts_something) continue;

    std::vector<std::vector<int>> trial = groups;
    for (auto& g : trial)
      for (auto& n : g)
        if (n == evict) n = -1;

    for (std::size_t h = 0; h < trial.size(); ++h) {
      std::vector<int> evicted;
      for (int v = 0; v < k; ++v)
        if (groups[h][static_cast<std::size_t>(v)] == evict)
          evicted.push_back(v);
      if (evicted.empty()) continue;
      std::sort(evicted.begin(), evicted.end(), [&](int a, int b) {
        double da = req.vms[static_cast<std::size_t>(a)].demand;
        double db = req.vms[static_cast<std::size_t>(b)].demand;
        if (da != db) return da > db;
        return a < b;
      });

      std::vector<int> targets;
      for (int v = 0; v < k; ++v) {
        int n = trial[h][static_cast<std::size_t>(v)];
        if (n >= 0) targets.push_back(n);
      }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      {
        auto residual = detail::residual_capacity(infra, req, trial);
        std::sort(targets.begin(), targets.end(), [&](int a, int b) {
          double ra = residual[static_cast<std::size_t>(a)];
          double rb = residual[static_cast<std::size_t>(b)];
          if (ra != rb) return ra > rb;
          return a < b;
        });
      }

      for (int target : targets) {
        for (auto it = evicted.begin(); it != evicted.end();) {
          int v = *it;
          // a copy of v already on the target (another group) is free;
          // otherwise it must fit in the target's remaining capacity
          bool already_there = false;
          for (const auto& g : trial)
            if (g[static_cast<std::size_t>(v)] == target) already_there = true;
          bool fits = already_there;
          if (!fits) {
            auto residual = detail::residual_capacity(infra, req, trial);
            fits = residual[static_cast<std::size_t>(target)] >=
                   req.vms[static_cast<std::size_t>(v)].demand;
          }
          if (fits &&
              detail::compatible_with_group(infra, req, trial[h], v, target)) {
            trial[h][static_cast<std::size_t>(v)] = target;
            it = evicted.erase(it);
          } else {
            ++it;
          }
        }
      }
      // VMs still in `evicted` stay unplaced in this group; validation
      // below decides whether that is survivable.
    }

    ValidationReport rep =
        validate_placement(infra, req, PlacementAssignment{trial}, model);
    if (rep.ok) groups = std::move(trial);
  }
  return groups;
}

/// Full heuristic: grows up to H groups with dsr_place. A group must place
/// the whole service to count; when a later group runs out of fresh nodes
/// for some VMs it completes itself by sharing, per missing VM, the node an
/// earlier group already uses for that VM (checked against this group's
/// pairwise requirements, no extra capacity since the copy is the same).
/// Accepts as soon as the combined availability reaches delta, then runs
/// the eviction pass to shrink the footprint.
inline PlacementOutcome dsr(const Infrastructure& infra,
                            const PlacementRequest& req) {
  auto start = std::chrono::steady_clock::now();
  infra.check();
  req.check();
  const int k = req.k();
  AtomUniverse u = infra.make_universe();

  PlacementOutcome out;
  std::vector<std::vector<int>> groups;
  for (int h = 0; h < req.H; ++h) {
    std::vector<int> g = dsr_place(infra, req, groups);
    if (std::all_of(g.begin(), g.end(), [](int n) { return n < 0; }))
      break;  // no progress is possible: capacity only shrinks

    bool complete = true;
    for (int v = 0; v < k; ++v) {
      if (g[static_cast<std::size_t>(v)] >= 0) continue;
      if (groups.empty()) { complete = false; break; }
      // adopt the copy the earliest group hosts, if this group can talk to it
      bool adopted = false;
      for (const auto& prev : groups) {
        int n = prev[static_cast<std::size_t>(v)];
        if (n < 0) continue;
        if (!detail::compatible_with_group(infra, req, g, v, n)) continue;
        g[static_cast<std::size_t>(v)] = n;
        adopted = true;
        break;
      }
      if (!adopted) { complete = false; break; }
    }
    if (!complete) break;  // retrying would rebuild the same group
    groups.push_back(std::move(g));

    PlacementAssignment asg{groups};
    double avail =
        placement_availability(u, infra, req, asg, FailureModel::multi);
    if (avail < req.delta) continue;

    auto reduced = partially_dsr_place(infra, req, groups);
    out.accepted = true;
    out.assignment.groups = std::move(reduced);
    out.used_nodes = used_nodes_of(out.assignment);
    out.availability = placement_availability(u, infra, req, out.assignment,
                                              FailureModel::multi);
    break;
  }
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace relcloud
