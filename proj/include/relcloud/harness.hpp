#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcloud/baseline_place.hpp"
#include "relcloud/dsr.hpp"
#include "relcloud/errors.hpp"
#include "relcloud/exact_place.hpp"
#include "relcloud/infrastructure.hpp"
#include "relcloud/network.hpp"
#include "relcloud/placement.hpp"
#include "relcloud/routing.hpp"

namespace relcloud {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Stable per-purpose seed derivation: the same (seed, index) pair always
/// yields the same stream, and distinct indices decorrelate.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ull));
}

inline double pick_from(std::mt19937_64& rng,
                        std::initializer_list<double> xs) {
  return xs.begin()[static_cast<std::size_t>(rng() % xs.size())];
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace detail

/// Parameters of a synthetic data-center placement workload.
struct PlacementWorkloadSpec {
  int node_count = 16;
  int request_count = 100;
  std::uint64_t seed = 0;
  /// When set, nodes are wired into shared-risk groups drawn from a stream
  /// independent of everything else, so flipping this flag changes nothing
  /// but the risk structure.
  bool with_srng = false;
  int srng_event_count = 15;
  double alpha = 1.0;
};

/// Parameters of a synthetic routing workload on a sparse connected network.
struct RoutingWorkloadSpec {
  int node_count = 12;
  int extra_links = 4;
  int request_count = 100;
  std::uint64_t seed = 0;
  bool with_srlg = false;
};

struct PlacementWorkload {
  std::uint64_t seed = 0;
  Infrastructure infra;
  std::vector<PlacementRequest> requests;
  /// One derived seed per request, consumed by randomized solvers.
  std::vector<std::uint64_t> request_seeds;
};

struct RoutingWorkload {
  std::uint64_t seed = 0;
  Network net;
  std::vector<RouteRequest> requests;
  /// Label budget per request for the capped search (w times node count).
  std::vector<std::size_t> label_caps;
};

/// One result row; the on-disk column order matches the field order.
struct ExperimentRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  int request_id = 0;
  bool accepted = false;
  int used_nodes = 0;  // hosting nodes for placement, path count for routing
  double availability = 0.0;
  std::int64_t runtime_us = 0;
};

struct AlgorithmAggregate {
  int total = 0;
  int accepted = 0;
  double acceptance_ratio = 0.0;
  /// Mean node footprint over accepted requests; meaningless (and flagged
  /// absent) when nothing was accepted.
  bool has_mean_used_nodes = false;
  double mean_used_nodes = 0.0;
  double mean_runtime_us = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::map<std::string, AlgorithmAggregate> aggregates;
};

namespace detail {

inline std::map<std::string, AlgorithmAggregate> aggregate_rows(
    const std::vector<ExperimentRow>& rows) {
  std::map<std::string, AlgorithmAggregate> agg;
  std::map<std::string, std::int64_t> used_sums;
  std::map<std::string, double> runtime_sums;
  for (const ExperimentRow& row : rows) {
    AlgorithmAggregate& a = agg[row.algorithm];
    ++a.total;
    runtime_sums[row.algorithm] += static_cast<double>(row.runtime_us);
    if (row.accepted) {
      ++a.accepted;
      used_sums[row.algorithm] += row.used_nodes;
    }
  }
  for (auto& [name, a] : agg) {
    a.acceptance_ratio =
        a.total == 0 ? 0.0
                     : static_cast<double>(a.accepted) /
                           static_cast<double>(a.total);
    a.mean_runtime_us =
        a.total == 0 ? 0.0 : runtime_sums[name] / static_cast<double>(a.total);
    if (a.accepted > 0) {
      a.has_mean_used_nodes = true;
      a.mean_used_nodes = static_cast<double>(used_sums[name]) /
                          static_cast<double>(a.accepted);
    }
  }
  return agg;
}

}  // namespace detail

/// Draws a data-center infrastructure plus a request stream. Everything is a
/// pure function of the parameters: the same parameters reproduce the same
/// workload byte for byte.
inline PlacementWorkload gen_placement_workload(
    const PlacementWorkloadSpec& spec) {
  if (spec.node_count < 2)
    throw ArgumentError("workload: need at least two server nodes");
  if (spec.request_count < 0)
    throw ArgumentError("workload: negative request count");

  PlacementWorkload w;
  w.seed = spec.seed;
  std::mt19937_64 rng(detail::mix_seed(spec.seed, 1));
  std::mt19937_64 risk_rng(detail::mix_seed(spec.seed, 2));

  const int n = spec.node_count;
  for (int i = 0; i < n; ++i) {
    ServerNode node;
    node.id = "srv" + std::to_string(i);
    node.capacity = static_cast<double>(detail::uniform_int(rng, 100, 200));
    node.availability =
        detail::pick_from(rng, {0.99, 0.999, 0.9995, 0.9999});
    w.infra.nodes.push_back(std::move(node));
  }

  // Two channel-quality tiers per server pair: a faster point at moderate
  // availability and a slower, more reliable one. Coinciding delays collapse
  // to the dominant point.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double d1 = static_cast<double>(detail::uniform_int(rng, 10, 20));
      double d2 = static_cast<double>(detail::uniform_int(rng, 20, 30));
      std::vector<FrontierPoint> frontier;
      if (d1 == d2)
        frontier = {{0.9999, d2}};
      else
        frontier = {{0.999, d1}, {0.9999, d2}};
      w.infra.set_frontier(a, b, std::move(frontier));
    }

  if (spec.with_srng) {
    for (int e = 0; e < spec.srng_event_count; ++e) {
      SrngEvent ev;
      ev.id = "risk" + std::to_string(e);
      ev.failure_prob =
          detail::pick_from(risk_rng, {1e-6, 2e-6, 3e-6, 4e-6, 5e-6});
      w.infra.srng_events.push_back(std::move(ev));
    }
    std::vector<int> order(static_cast<std::size_t>(spec.srng_event_count));
    for (ServerNode& node : w.infra.nodes) {
      std::iota(order.begin(), order.end(), 0);
      int count = static_cast<int>(risk_rng() % 6);  // up to five groups
      for (int j = 0; j < count; ++j) {
        std::size_t pos =
            static_cast<std::size_t>(j) +
            risk_rng() % (order.size() - static_cast<std::size_t>(j));
        std::swap(order[static_cast<std::size_t>(j)], order[pos]);
      }
      node.srng.assign(order.begin(), order.begin() + count);
      std::sort(node.srng.begin(), node.srng.end());
    }
  }
  w.infra.check();

  for (int r = 0; r < spec.request_count; ++r) {
    PlacementRequest req;
    int k = detail::uniform_int(rng, 3, 5);
    for (int v = 0; v < k; ++v) {
      Vm vm;
      vm.id = "vm" + std::to_string(r) + "_" + std::to_string(v);
      vm.demand = static_cast<double>(detail::uniform_int(rng, 60, 130));
      req.vms.push_back(std::move(vm));
    }
    req.delay_req.assign(static_cast<std::size_t>(k),
                         std::vector<double>(static_cast<std::size_t>(k), 0.0));
    req.avail_req.assign(static_cast<std::size_t>(k),
                         std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        double a = detail::pick_from(rng, {0.999, 0.9999});
        double d = static_cast<double>(detail::uniform_int(rng, 15, 25));
        req.avail_req[static_cast<std::size_t>(i)][static_cast<std::size_t>(
            j)] = a;
        req.avail_req[static_cast<std::size_t>(j)][static_cast<std::size_t>(
            i)] = a;
        req.delay_req[static_cast<std::size_t>(i)][static_cast<std::size_t>(
            j)] = d;
        req.delay_req[static_cast<std::size_t>(j)][static_cast<std::size_t>(
            i)] = d;
      }
    req.delta =
        detail::pick_from(rng, {0.999, 0.9999, 0.99999, 0.999999});
    req.H = 2;  // runners override per experiment arm
    req.alpha = spec.alpha;
    req.check();
    w.requests.push_back(std::move(req));
    w.request_seeds.push_back(
        detail::mix_seed(spec.seed, 1000 + static_cast<std::uint64_t>(r)));
  }
  return w;
}

/// Draws a sparse connected multigraph (spanning tree plus a few extra
/// links) and a request stream over it.
inline RoutingWorkload gen_routing_workload(const RoutingWorkloadSpec& spec) {
  if (spec.node_count < 2)
    throw ArgumentError("workload: need at least two network nodes");
  if (spec.request_count < 0)
    throw ArgumentError("workload: negative request count");

  RoutingWorkload w;
  w.seed = spec.seed;
  std::mt19937_64 rng(detail::mix_seed(spec.seed, 3));
  std::mt19937_64 risk_rng(detail::mix_seed(spec.seed, 4));

  const int n = spec.node_count;
  for (int i = 0; i < n; ++i) w.net.node_ids.push_back("r" + std::to_string(i));

  auto add_link = [&](int u, int v) {
    NetLink link;
    link.id = "link" + std::to_string(w.net.links.size());
    link.u = u;
    link.v = v;
    link.availability = detail::pick_from(rng, {0.99, 0.999, 0.9999});
    link.delay = static_cast<double>(detail::uniform_int(rng, 10, 25));
    w.net.links.push_back(std::move(link));
  };
  for (int i = 1; i < n; ++i)
    add_link(static_cast<int>(rng() % static_cast<std::uint64_t>(i)), i);
  for (int attempts = 0, added = 0;
       added < spec.extra_links && attempts < 20 * spec.extra_links + 20;
       ++attempts) {
    int u = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    int v = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    if (u == v) continue;  // parallel links are fine, self-loops are not
    add_link(u, v);
    ++added;
  }

  if (spec.with_srlg) {
    int events = std::max(1, n / 4);
    for (int e = 0; e < events; ++e) {
      SrngEvent ev;
      ev.id = "duct" + std::to_string(e);
      ev.failure_prob = detail::pick_from(risk_rng, {1e-4, 5e-4, 1e-3});
      w.net.srlg_events.push_back(std::move(ev));
    }
    for (NetLink& link : w.net.links)
      if (risk_rng() % 4 == 0)
        link.srlg = {static_cast<int>(risk_rng() %
                                      static_cast<std::uint64_t>(events))};
  }
  w.net.check();

  for (int r = 0; r < spec.request_count; ++r) {
    RouteRequest req;
    req.s = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    int offset = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    req.t = (req.s + offset) % n;
    req.eta = detail::pick_from(
        rng, {0.9995, 0.9996, 0.9997, 0.9998, 0.9999});
    req.max_delay = static_cast<double>(detail::uniform_int(rng, 15, 25));
    req.w = detail::uniform_int(rng, 1, 3);
    req.check(w.net);
    w.requests.push_back(req);
    w.label_caps.push_back(static_cast<std::size_t>(req.w) *
                           static_cast<std::size_t>(n));
  }
  return w;
}

/// Runs each named placement algorithm over the workload once per group
/// budget in `h_values`, labelling rows "<name>_H<h>". Known names: exact,
/// dsr, gp (greedy baseline), rp (randomized baseline). Accepted results are
/// re-validated; an invalid accepted placement is a solver bug and throws.
inline ExperimentReport run_placement_experiment(
    const PlacementWorkload& w, const std::vector<std::string>& algorithms,
    const std::vector<int>& h_values) {
  for (const std::string& name : algorithms)
    if (name != "exact" && name != "dsr" && name != "gp" && name != "rp")
      throw ArgumentError("experiment: unknown placement algorithm " + name);
  if (h_values.empty())
    throw ArgumentError("experiment: need at least one group budget");

  ExperimentReport report;
  for (const std::string& name : algorithms)
    for (int h : h_values) {
      if (h < 1) throw ArgumentError("experiment: group budget must be >= 1");
      const std::string label = name + "_H" + std::to_string(h);
      for (std::size_t i = 0; i < w.requests.size(); ++i) {
        PlacementRequest req = w.requests[i];
        req.H = h;
        PlacementOutcome out;
        try {
          if (name == "exact") {
            out = exact_place(w.infra, req);
          } else if (name == "dsr") {
            out = dsr(w.infra, req);
          } else if (name == "gp") {
            out = baseline_place(w.infra, req, BaselineStrategy::greedy,
                                 w.request_seeds[i]);
          } else {
            out = baseline_place(w.infra, req, BaselineStrategy::random,
                                 w.request_seeds[i]);
          }
        } catch (const SizeError&) {
          out = PlacementOutcome{};  // over the solver's hard limit: rejected
        }

        if (out.accepted) {
          ValidationReport check = validate_placement(
              w.infra, req, out.assignment, FailureModel::multi);
          if (!check.ok)
            throw std::logic_error("experiment: solver " + label +
                                   " produced an invalid placement");
        }

        ExperimentRow row;
        row.algorithm = label;
        row.seed = w.seed;
        row.request_id = static_cast<int>(i);
        row.accepted = out.accepted;
        row.used_nodes =
            out.accepted ? static_cast<int>(out.used_nodes.size()) : 0;
        row.availability = out.availability;
        row.runtime_us = out.runtime.count();
        report.rows.push_back(std::move(row));
      }
    }
  report.aggregates = detail::aggregate_rows(report.rows);
  return report;
}

/// Runs each named routing algorithm over the workload. Known names: exact,
/// tadra (label budget from the workload), seq_tamcra, slf (single-path
/// baseline; always routes one path, whatever the request allows). The
/// used_nodes column carries the path count. Accepted results are
/// re-verified against the request; inconsistencies throw.
inline ExperimentReport run_routing_experiment(
    const RoutingWorkload& w, const std::vector<std::string>& algorithms) {
  for (const std::string& name : algorithms)
    if (name != "exact" && name != "tadra" && name != "seq_tamcra" &&
        name != "slf")
      throw ArgumentError("experiment: unknown routing algorithm " + name);

  AtomUniverse u = w.net.make_universe();
  ExperimentReport report;
  for (const std::string& name : algorithms)
    for (std::size_t i = 0; i < w.requests.size(); ++i) {
      const RouteRequest& req = w.requests[i];
      RouteOutcome out;
      try {
        if (name == "exact") {
          out = route_exact(w.net, req);
        } else if (name == "tadra") {
          out = tadra(w.net, req, w.label_caps[i]);
        } else if (name == "seq_tamcra") {
          out = seq_tamcra(w.net, req);
        } else {
          RouteRequest single = req;
          single.w = 1;
          out = route_single_link_failure(w.net, single);
        }
      } catch (const SizeError&) {
        out = RouteOutcome{};  // over the solver's hard limit: rejected
      }

      if (out.accepted) {
        for (const std::vector<int>& path : out.paths) {
          double delay = 0.0;
          for (int l : path)
            delay += w.net.links[static_cast<std::size_t>(l)].delay;
          if (delay > req.max_delay + 1e-9)
            throw std::logic_error("experiment: solver " + name +
                                   " returned a late path");
        }
        double check = path_set_availability(u, w.net, out.paths);
        if (std::abs(check - out.availability) > 1e-9)
          throw std::logic_error("experiment: solver " + name +
                                 " misreported availability");
      }

      ExperimentRow row;
      row.algorithm = name;
      row.seed = w.seed;
      row.request_id = static_cast<int>(i);
      row.accepted = out.accepted;
      row.used_nodes = out.accepted ? static_cast<int>(out.paths.size()) : 0;
      row.availability = out.availability;
      row.runtime_us = out.runtime.count();
      report.rows.push_back(std::move(row));
    }
  report.aggregates = detail::aggregate_rows(report.rows);
  return report;
}

}  // namespace relcloud
