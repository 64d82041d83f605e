#pragma once

#include <algorithm>
#include <vector>

#include "relcloud/infrastructure.hpp"
#include "relcloud/routing.hpp"

namespace relcloud {

/// Best achievable availability between two nodes at each delay budget on
/// the grid, reduced to its Pareto frontier (ascending delay, strictly
/// ascending availability). The acceptance threshold plays no role: the
/// underlying search maximises availability, so each budget yields exactly
/// one meaningful point.
inline std::vector<FrontierPoint> route_compat_frontier(
    const Network& net, int m, int n, std::vector<double> delay_grid, int w) {
  std::sort(delay_grid.begin(), delay_grid.end());
  delay_grid.erase(std::unique(delay_grid.begin(), delay_grid.end()),
                   delay_grid.end());

  std::vector<FrontierPoint> frontier;
  double best_so_far = 0.0;
  for (double d : delay_grid) {
    RouteRequest req;
    req.s = m;
    req.t = n;
    req.eta = 1.0;  // irrelevant to the achieved maximum
    req.max_delay = d;
    req.w = w;
    RouteOutcome out = route_exact(net, req);
    if (out.availability > best_so_far) {
      best_so_far = out.availability;
      frontier.push_back({out.availability, d});
    }
  }
  return frontier;
}

/// Builds the full pairwise compatibility table of an infrastructure whose
/// servers sit on the given network nodes (server i at attach[i]).
inline void fill_compat_from_network(Infrastructure& infra, const Network& net,
                                     const std::vector<int>& attach,
                                     const std::vector<double>& delay_grid,
                                     int w) {
  if (attach.size() != infra.nodes.size())
    throw ArgumentError("compat: need one attachment point per server node");
  const int count = static_cast<int>(infra.nodes.size());
  for (int a = 0; a < count; ++a)
    for (int b = a + 1; b < count; ++b) {
      if (attach[static_cast<std::size_t>(a)] ==
          attach[static_cast<std::size_t>(b)]) {
        // colocated servers talk locally, no network links involved
        infra.set_frontier(a, b, {{1.0, 0.0}});
        continue;
      }
      auto frontier = route_compat_frontier(
          net, attach[static_cast<std::size_t>(a)],
          attach[static_cast<std::size_t>(b)], delay_grid, w);
      if (!frontier.empty()) infra.set_frontier(a, b, std::move(frontier));
    }
}

}  // namespace relcloud
