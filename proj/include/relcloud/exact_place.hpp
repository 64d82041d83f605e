#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "relcloud/placement.hpp"

namespace relcloud {

namespace detail {

/// Depth-first search for a feasible assignment on one candidate node
/// subset. Slots are (group, vm) pairs filled in order. Under the group
/// failure model every group places all VMs, and several groups may place a
/// VM on the same node; the shared copy consumes capacity once. Under the
/// single-node model backup groups may leave VMs out, and placing a VM
/// again on a node it already occupies is skipped because an extra copy
/// changes neither the host set nor the capacity picture. Groups after the
/// first (after the second under the single-node model) are forced into
/// non-increasing lexicographic order, which removes group-permutation
/// symmetry. After each completed group the prefix is tested against the
/// availability target, so unused group budget is simply left empty.
class ExactSubsetSearch {
 public:
  ExactSubsetSearch(const Infrastructure& infra, const PlacementRequest& req,
                    FailureModel model, const AtomUniverse& u,
                    const std::vector<int>& subset)
      : infra_(infra), req_(req), model_(model), u_(u), subset_(subset),
        k_(req.k()), H_(req.H),
        groups_(static_cast<std::size_t>(req.H),
                std::vector<int>(static_cast<std::size_t>(req.k()), -1)),
        consumed_(infra.nodes.size(), 0.0),
        vm_on_(static_cast<std::size_t>(req.k()),
               std::vector<int>(infra.nodes.size(), 0)) {
    phat_ = 0.0;
    for (int n : subset_)
      phat_ = std::max(phat_, infra_.node_risk_availability(n));
  }

  bool run() { return fill(0, 0, false); }

  const std::vector<std::vector<int>>& groups() const { return groups_; }

 private:
  double current_multi(int upto_group) const {
    std::vector<AtomGroup> ag;
    for (int h = 0; h <= upto_group; ++h) {
      AtomGroup g = group_atom_set(infra_, groups_[static_cast<std::size_t>(h)]);
      if (!g.empty()) ag.push_back(std::move(g));
    }
    if (ag.empty()) return 0.0;
    return multi_group_availability(u_, ag);
  }

  /// Upper bound on the final availability reachable from the current state:
  /// groups beyond `upto_group` each contribute at most the best single-node
  /// risk availability in the subset, and monotone up-events are positively
  /// correlated, so the independent combination is an upper bound.
  bool availability_hopeless(int upto_group) const {
    if (model_ != FailureModel::multi) return false;
    double have = current_multi(upto_group);
    int remaining = H_ - upto_group - 1;
    double bound = 1.0 - (1.0 - have) * std::pow(1.0 - phat_, remaining);
    return bound < req_.delta;
  }

  bool group_feasible_pair(int h, int v, int n) const {
    const auto& g = groups_[static_cast<std::size_t>(h)];
    for (int w = 0; w < v; ++w) {
      int m = g[static_cast<std::size_t>(w)];
      if (m < 0 || m == n) continue;
      if (!infra_.pair_feasible(
              m, n,
              req_.avail_req[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)],
              req_.delay_req[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)]))
        return false;
    }
    return true;
  }

  /// Whether the groups built so far already satisfy the availability
  /// target. Both models are monotone in further groups, so the first
  /// passing prefix can be returned immediately.
  bool prefix_meets_target(int upto_group) const {
    if (model_ == FailureModel::multi)
      return current_multi(upto_group) >= req_.delta;
    std::vector<AtomGroup> hosting;
    hosting.reserve(static_cast<std::size_t>(k_));
    for (int v = 0; v < k_; ++v) {
      std::vector<AtomId> hosts;
      for (int h = 0; h <= upto_group; ++h) {
        int n = groups_[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)];
        if (n >= 0) hosts.push_back(static_cast<AtomId>(n));
      }
      hosting.emplace_back(std::move(hosts));
    }
    return min_survivor_availability(u_, hosting) >= req_.delta;
  }

  // `tight` means the group built so far equals its predecessor on every
  // earlier slot, so this slot may not exceed the predecessor's value.
  bool fill(int h, int v, bool tight) {
    if (v == k_) {
      if (prefix_meets_target(h)) return true;
      if (h + 1 == H_) return false;
      if (availability_hopeless(h)) return false;
      return fill(h + 1, 0, h + 1 >= first_ordered_group());
    }
    int bound = tight ? groups_[static_cast<std::size_t>(h - 1)][static_cast<std::size_t>(v)]
                      : std::numeric_limits<int>::max();
    const double demand = req_.vms[static_cast<std::size_t>(v)].demand;

    for (int n : subset_) {
      if (n > bound) continue;
      int& uses = vm_on_[static_cast<std::size_t>(v)][static_cast<std::size_t>(n)];
      if (model_ == FailureModel::single_node && uses > 0) continue;
      bool fresh = uses == 0;
      if (fresh && consumed_[static_cast<std::size_t>(n)] + demand >
                       infra_.nodes[static_cast<std::size_t>(n)].capacity)
        continue;
      if (!group_feasible_pair(h, v, n)) continue;

      groups_[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)] = n;
      ++uses;
      if (fresh) consumed_[static_cast<std::size_t>(n)] += demand;
      if (fill(h, v + 1, tight && n == bound)) return true;
      if (fresh) consumed_[static_cast<std::size_t>(n)] -= demand;
      --uses;
      groups_[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)] = -1;
    }

    // only single-node backup groups may leave a VM out; every group under
    // the group failure model and the single-node primary group place all
    if (model_ == FailureModel::single_node && h > 0 && -1 <= bound) {
      if (fill(h, v + 1, tight && bound == -1)) return true;
    }
    return false;
  }

  int first_ordered_group() const {
    return model_ == FailureModel::single_node ? 2 : 1;
  }

  const Infrastructure& infra_;
  const PlacementRequest& req_;
  FailureModel model_;
  const AtomUniverse& u_;
  const std::vector<int>& subset_;
  int k_, H_;
  double phat_ = 0.0;
  std::vector<std::vector<int>> groups_;
  std::vector<double> consumed_;
  std::vector<std::vector<int>> vm_on_;
};

}  // namespace detail

/// Minimal-used-node placement by exhaustive search: candidate node subsets
/// are tried in increasing cardinality, so the first feasible assignment
/// uses the optimum number of nodes. Exponential; guarded to k <= 6 and
/// N <= 20 (larger instances belong to dsr/baseline_place).
inline PlacementOutcome exact_place(const Infrastructure& infra,
                                    const PlacementRequest& req,
                                    FailureModel model = FailureModel::multi) {
  auto start = std::chrono::steady_clock::now();
  infra.check();
  req.check();
  const int N = static_cast<int>(infra.nodes.size());
  if (req.k() > 6 || N > 20)
    throw SizeError("exact_place: instance too large (k=" +
                    std::to_string(req.k()) + ", N=" + std::to_string(N) +
                    "; limit k <= 6, N <= 20) - use dsr or baseline_place");

  AtomUniverse u = infra.make_universe();
  double total_demand = 0.0;
  for (const auto& v : req.vms) total_demand += v.demand;

  PlacementOutcome out;
  for (int c = 1; c <= N && !out.accepted; ++c) {
    // lexicographic combination enumeration over node indices
    std::vector<int> subset(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
      double cap = 0.0, phat = 0.0;
      for (int n : subset) {
        cap += infra.nodes[static_cast<std::size_t>(n)].capacity;
        phat = std::max(phat, infra.node_risk_availability(n));
      }
      bool worth = cap >= total_demand;
      if (worth && model == FailureModel::multi)
        worth = 1.0 - std::pow(1.0 - phat, req.H) >= req.delta;
      if (worth && model == FailureModel::single_node && c == 1)
        worth = infra.nodes[static_cast<std::size_t>(subset[0])].availability >=
                req.delta;
      if (worth) {
        detail::ExactSubsetSearch search(infra, req, model, u, subset);
        if (search.run()) {
          out.accepted = true;
          out.assignment.groups = search.groups();
          break;
        }
      }
      // advance to the next combination
      int i = c - 1;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == N - c + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < c; ++j)
        subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  if (out.accepted) {
    // drop trailing empty groups (unused budget)
    while (!out.assignment.groups.empty()) {
      const auto& last = out.assignment.groups.back();
      if (std::any_of(last.begin(), last.end(), [](int n) { return n >= 0; }))
        break;
      out.assignment.groups.pop_back();
    }
    out.used_nodes = used_nodes_of(out.assignment);
    out.availability =
        placement_availability(u, infra, req, out.assignment, model);
  }
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace relcloud
