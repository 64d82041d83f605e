#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "relcloud/placement.hpp"

namespace relcloud {

enum class BaselineStrategy { greedy, random };

/// Reference heuristics sharing the group loop of dsr but not its ranking
/// and with no consolidation pass. Each round walks the not-yet-used nodes
/// in a fixed order (descending availability for greedy, a seeded shuffle
/// for random) and packs every still-unplaced VM that fits, heaviest first.
/// A round must place the whole service to yield a group; the nodes a group
/// uses are retired from later rounds, so no two groups can coincide. Once
/// a round cannot complete, later rounds cannot either (they see fewer
/// nodes) and the search stops. Returns as soon as the built groups meet
/// the availability target.
inline PlacementOutcome baseline_place(const Infrastructure& infra,
                                       const PlacementRequest& req,
                                       BaselineStrategy strategy,
                                       std::uint64_t seed = 0) {
  auto start = std::chrono::steady_clock::now();
  infra.check();
  req.check();
  const int k = req.k();
  const int N = static_cast<int>(infra.nodes.size());
  AtomUniverse u = infra.make_universe();
  std::mt19937_64 rng(seed);

  // VMs visited heaviest-first within every node
  std::vector<int> vm_order(static_cast<std::size_t>(k));
  for (int v = 0; v < k; ++v) vm_order[static_cast<std::size_t>(v)] = v;
  std::sort(vm_order.begin(), vm_order.end(), [&](int a, int b) {
    double da = req.vms[static_cast<std::size_t>(a)].demand;
    double db = req.vms[static_cast<std::size_t>(b)].demand;
    if (da != db) return da > db;
    return a < b;
  });

  PlacementOutcome out;
  std::vector<std::vector<int>> groups;
  std::vector<double> residual(infra.nodes.size());
  for (int n = 0; n < N; ++n)
    residual[static_cast<std::size_t>(n)] =
        infra.nodes[static_cast<std::size_t>(n)].capacity;
  std::vector<char> retired(infra.nodes.size(), 0);

  for (int h = 0; h < req.H; ++h) {
    std::vector<int> node_order;
    node_order.reserve(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n)
      if (!retired[static_cast<std::size_t>(n)]) node_order.push_back(n);
    if (strategy == BaselineStrategy::greedy) {
      std::sort(node_order.begin(), node_order.end(), [&](int a, int b) {
        double aa = infra.nodes[static_cast<std::size_t>(a)].availability;
        double ab = infra.nodes[static_cast<std::size_t>(b)].availability;
        if (aa != ab) return aa > ab;
        return a < b;
      });
    } else {
      for (int i = static_cast<int>(node_order.size()) - 1; i > 0; --i) {
        auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(node_order[static_cast<std::size_t>(i)],
                  node_order[static_cast<std::size_t>(j)]);
      }
    }

    std::vector<int> g(static_cast<std::size_t>(k), -1);
    int placed = 0;
    for (int n : node_order) {
      for (int v : vm_order) {
        if (g[static_cast<std::size_t>(v)] >= 0) continue;
        double demand = req.vms[static_cast<std::size_t>(v)].demand;
        if (residual[static_cast<std::size_t>(n)] < demand) continue;
        if (!detail::compatible_with_group(infra, req, g, v, n)) continue;
        g[static_cast<std::size_t>(v)] = n;
        residual[static_cast<std::size_t>(n)] -= demand;
        ++placed;
      }
      if (placed == k) break;
    }
    if (placed < k) break;  // with even fewer nodes no later round completes

    for (int n : g) retired[static_cast<std::size_t>(n)] = 1;
    groups.push_back(std::move(g));
    PlacementAssignment asg{groups};
    double avail =
        placement_availability(u, infra, req, asg, FailureModel::multi);
    if (avail >= req.delta) {
      out.accepted = true;
      out.assignment = std::move(asg);
      out.used_nodes = used_nodes_of(out.assignment);
      out.availability = avail;
      break;
    }
  }
  out.runtime = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return out;
}

}  // namespace relcloud
