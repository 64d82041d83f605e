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

enum class FailureModel { multi, single_node };

struct Vm {
  std::string id;
  double demand = 0.0;
};

/// One service request: k VMs with pairwise delay/availability requirements,
/// a target availability delta, a group budget H, and the delay weight alpha
/// used by the heuristic's VM ordering.
struct PlacementRequest {
  std::vector<Vm> vms;
  std::vector<std::vector<double>> delay_req;   // k x k, symmetric, diagonal ignored
  std::vector<std::vector<double>> avail_req;   // k x k, symmetric, diagonal ignored
  double delta = 0.999;
  int H = 1;
  double alpha = 1.0;

  int k() const { return static_cast<int>(vms.size()); }

  void check() const {
    const std::size_t n = vms.size();
    if (n == 0) throw ArgumentError("request: needs at least one VM");
    std::set<std::string> ids;
    for (const auto& v : vms) {
      if (!(v.demand > 0.0))
        throw ArgumentError("vm '" + v.id + "': demand must be positive");
      if (!ids.insert(v.id).second)
        throw ArgumentError("vm '" + v.id + "': duplicate id");
    }
    if (delay_req.size() != n || avail_req.size() != n)
      throw ArgumentError("request: matrices must be k x k");
    for (std::size_t i = 0; i < n; ++i) {
      if (delay_req[i].size() != n || avail_req[i].size() != n)
        throw ArgumentError("request: matrices must be k x k");
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;  // diagonal carries no constraint
        if (delay_req[i][j] != delay_req[j][i] ||
            avail_req[i][j] != avail_req[j][i])
          throw ArgumentError("request: matrices must be symmetric");
        if (!(delay_req[i][j] > 0.0))
          throw ArgumentError("request: delay requirements must be positive");
        if (!(avail_req[i][j] > 0.0) || avail_req[i][j] > 1.0)
          throw ArgumentError("request: availability requirements in (0,1]");
      }
    }
    if (!(delta > 0.0) || delta > 1.0)
      throw ArgumentError("request: delta must lie in (0,1]");
    if (H < 1) throw ArgumentError("request: H must be >= 1");
    if (!(alpha > 0.0)) throw ArgumentError("request: alpha must be positive");
  }
};

/// groups[h][v] = node index hosting VM v in group h, or -1 when the group
/// does not place that VM. A VM placed on the same node by several groups is
/// one replica (it consumes capacity once and fails once).
struct PlacementAssignment {
  std::vector<std::vector<int>> groups;

  bool empty() const {
    for (const auto& g : groups)
      for (int n : g)
        if (n >= 0) return false;
    return true;
  }
};

struct PlacementOutcome {
  bool accepted = false;
  PlacementAssignment assignment;
  std::vector<int> used_nodes;
  double availability = 0.0;
  std::chrono::microseconds runtime{0};
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  double availability = 0.0;

  void fail(std::string why) {
    ok = false;
    violations.push_back(std::move(why));
  }
};

namespace detail {

inline void check_assignment_shape(const Infrastructure& infra,
                                   const PlacementRequest& req,
                                   const PlacementAssignment& asg) {
  const int n = static_cast<int>(infra.nodes.size());
  for (const auto& g : asg.groups) {
    if (static_cast<int>(g.size()) != req.k())
      throw ArgumentError("assignment: each group must list all k VMs");
    for (int host : g)
      if (host < -1 || host >= n)
        throw ArgumentError("assignment: node index out of range");
  }
}

/// Whether hosting `vm` on `node` keeps every pairwise requirement inside
/// the partially built group satisfiable.
inline bool compatible_with_group(const Infrastructure& infra,
                                  const PlacementRequest& req,
                                  const std::vector<int>& group, int vm,
                                  int node) {
  for (int w = 0; w < req.k(); ++w) {
    int m = group[static_cast<std::size_t>(w)];
    if (w == vm || m < 0 || m == node) continue;
    if (!infra.pair_feasible(
            m, node,
            req.avail_req[static_cast<std::size_t>(w)][static_cast<std::size_t>(vm)],
            req.delay_req[static_cast<std::size_t>(w)][static_cast<std::size_t>(vm)]))
      return false;
  }
  return true;
}

}  // namespace detail

/// Distinct nodes used anywhere in the assignment, ascending.
inline std::vector<int> used_nodes_of(const PlacementAssignment& asg) {
  std::vector<int> used;
  for (const auto& g : asg.groups)
    for (int n : g)
      if (n >= 0) used.push_back(n);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

/// Risk atoms of one group: its nodes plus all their shared-risk events.
inline AtomGroup group_atom_set(const Infrastructure& infra,
                                const std::vector<int>& group) {
  std::vector<AtomId> atoms;
  const auto base = static_cast<AtomId>(infra.nodes.size());
  for (int n : group) {
    if (n < 0) continue;
    atoms.push_back(static_cast<AtomId>(n));
    for (int e : infra.nodes[static_cast<std::size_t>(n)].srng)
      atoms.push_back(base + static_cast<AtomId>(e));
  }
  return AtomGroup(std::move(atoms));
}

/// Atom groups of the complete placement groups. A group that places only
/// some of the VMs cannot run the service on its own, so it contributes no
/// survival alternative; empty groups are unused budget.
inline std::vector<AtomGroup> assignment_atom_groups(
    const Infrastructure& infra, const PlacementAssignment& asg) {
  std::vector<AtomGroup> out;
  for (const auto& g : asg.groups) {
    bool complete = !g.empty() &&
                    std::all_of(g.begin(), g.end(), [](int n) { return n >= 0; });
    if (!complete) continue;
    AtomGroup ag = group_atom_set(infra, g);
    if (!ag.empty()) out.push_back(std::move(ag));
  }
  return out;
}

/// Per-node capacity consumption; a VM placed on the same node by several
/// groups consumes its demand there once.
inline std::vector<double> capacity_consumption(
    const Infrastructure& infra, const PlacementRequest& req,
    const PlacementAssignment& asg) {
  std::vector<double> used(infra.nodes.size(), 0.0);
  for (int v = 0; v < req.k(); ++v) {
    std::vector<int> hosts;
    for (const auto& g : asg.groups)
      if (g[static_cast<std::size_t>(v)] >= 0)
        hosts.push_back(g[static_cast<std::size_t>(v)]);
    std::sort(hosts.begin(), hosts.end());
    hosts.erase(std::unique(hosts.begin(), hosts.end()), hosts.end());
    for (int n : hosts)
      used[static_cast<std::size_t>(n)] += req.vms[static_cast<std::size_t>(v)].demand;
  }
  return used;
}

/// Whether every VM is placed by at least one group.
inline bool covers_all_vms(const PlacementRequest& req,
                           const PlacementAssignment& asg) {
  for (int v = 0; v < req.k(); ++v) {
    bool placed = false;
    for (const auto& g : asg.groups)
      if (g[static_cast<std::size_t>(v)] >= 0) { placed = true; break; }
    if (!placed) return false;
  }
  return true;
}

/// Availability of an assignment under the chosen failure model. Returns 0
/// for an assignment with no placements; under the single-node model a VM
/// must be covered before the value means anything (validate checks that).
inline double placement_availability(const AtomUniverse& u,
                                     const Infrastructure& infra,
                                     const PlacementRequest& req,
                                     const PlacementAssignment& asg,
                                     FailureModel model) {
  if (model == FailureModel::multi) {
    std::vector<AtomGroup> groups = assignment_atom_groups(infra, asg);
    if (groups.empty()) return 0.0;
    return multi_group_availability(u, groups);
  }
  std::vector<AtomGroup> hosting;
  for (int v = 0; v < req.k(); ++v) {
    std::vector<AtomId> hosts;
    for (const auto& g : asg.groups)
      if (g[static_cast<std::size_t>(v)] >= 0)
        hosts.push_back(static_cast<AtomId>(g[static_cast<std::size_t>(v)]));
    if (hosts.empty()) return 0.0;  // uncovered VM: nothing to survive with
    hosting.emplace_back(std::move(hosts));
  }
  return min_survivor_availability(u, hosting);
}

/// Full feasibility check of an assignment: coverage, capacity (a VM's
/// demand counted once per distinct hosting node), intra-group pairwise
/// communication feasibility, and the availability target.
inline ValidationReport validate_placement(const Infrastructure& infra,
                                           const PlacementRequest& req,
                                           const PlacementAssignment& asg,
                                           FailureModel model) {
  infra.check();
  req.check();
  detail::check_assignment_shape(infra, req, asg);

  ValidationReport report;
  int nonempty = 0;
  for (const auto& g : asg.groups)
    if (std::any_of(g.begin(), g.end(), [](int n) { return n >= 0; }))
      ++nonempty;
  if (nonempty > req.H)
    report.fail("uses " + std::to_string(nonempty) + " groups, budget H=" +
                std::to_string(req.H));

  if (!covers_all_vms(req, asg))
    report.fail("some VM is not placed by any group");
  if (model == FailureModel::multi) {
    // a protection group only counts when it runs the whole service, so a
    // group that places anything must place everything (sharing nodes with
    // other groups is how partial protection is expressed)
    for (std::size_t h = 0; h < asg.groups.size(); ++h) {
      const auto& g = asg.groups[h];
      int placed = static_cast<int>(
          std::count_if(g.begin(), g.end(), [](int n) { return n >= 0; }));
      if (placed > 0 && placed < req.k())
        report.fail("group " + std::to_string(h + 1) +
                    " is incomplete: places " + std::to_string(placed) +
                    " of " + std::to_string(req.k()) + " VMs");
    }
  }
  if (model == FailureModel::single_node && !asg.groups.empty()) {
    for (int v = 0; v < req.k(); ++v)
      if (asg.groups[0][static_cast<std::size_t>(v)] < 0) {
        report.fail("group 1 must place every VM under the single-node model");
        break;
      }
  }

  std::vector<double> used = capacity_consumption(infra, req, asg);
  for (std::size_t n = 0; n < infra.nodes.size(); ++n)
    if (used[n] > infra.nodes[n].capacity)
      report.fail("node '" + infra.nodes[n].id + "' over capacity: " +
                  std::to_string(used[n]) + " > " +
                  std::to_string(infra.nodes[n].capacity));

  for (std::size_t h = 0; h < asg.groups.size(); ++h) {
    const auto& g = asg.groups[h];
    for (int a = 0; a < req.k(); ++a)
      for (int b = a + 1; b < req.k(); ++b) {
        int m = g[static_cast<std::size_t>(a)];
        int n = g[static_cast<std::size_t>(b)];
        if (m < 0 || n < 0 || m == n) continue;
        if (!infra.pair_feasible(m, n, req.avail_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                                 req.delay_req[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]))
          report.fail("group " + std::to_string(h + 1) + ": VMs '" +
                      req.vms[static_cast<std::size_t>(a)].id + "' and '" +
                      req.vms[static_cast<std::size_t>(b)].id +
                      "' placed on incompatible nodes '" +
                      infra.nodes[static_cast<std::size_t>(m)].id + "', '" +
                      infra.nodes[static_cast<std::size_t>(n)].id + "'");
      }
  }

  AtomUniverse u = infra.make_universe();
  report.availability = placement_availability(u, infra, req, asg, model);
  if (report.availability < req.delta)
    report.fail("availability " + std::to_string(report.availability) +
                " below delta " + std::to_string(req.delta));
  return report;
}

}  // namespace relcloud
