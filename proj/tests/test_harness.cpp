#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include "relcloud/harness.hpp"
#include "relcloud/io.hpp"

using namespace relcloud;

namespace {

bool rows_equal_ignoring_runtime(const std::vector<ExperimentRow>& a,
                                 const std::vector<ExperimentRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].algorithm != b[i].algorithm) return false;
    if (a[i].seed != b[i].seed) return false;
    if (a[i].request_id != b[i].request_id) return false;
    if (a[i].accepted != b[i].accepted) return false;
    if (a[i].used_nodes != b[i].used_nodes) return false;
    if (a[i].availability != b[i].availability) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("placement workload is a pure function of its spec", "[harness]") {
  PlacementWorkloadSpec spec;
  spec.node_count = 16;
  spec.request_count = 20;
  spec.seed = 42;

  PlacementWorkload a = gen_placement_workload(spec);
  PlacementWorkload b = gen_placement_workload(spec);
  CHECK(infrastructure_to_json(a.infra) == infrastructure_to_json(b.infra));
  REQUIRE(a.requests.size() == 20);
  REQUIRE(b.requests.size() == 20);
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    CHECK(placement_request_to_json(a.requests[i]) ==
          placement_request_to_json(b.requests[i]));
    CHECK(a.request_seeds[i] == b.request_seeds[i]);
  }

  spec.seed = 43;
  PlacementWorkload c = gen_placement_workload(spec);
  CHECK(infrastructure_to_json(a.infra) != infrastructure_to_json(c.infra));
}

TEST_CASE("workload draws stay inside their documented ranges", "[harness]") {
  PlacementWorkloadSpec spec;
  spec.node_count = 16;
  spec.request_count = 50;
  spec.seed = 7;
  spec.with_srng = true;
  PlacementWorkload w = gen_placement_workload(spec);

  REQUIRE(w.infra.nodes.size() == 16);
  CHECK(w.infra.srng_events.size() == 15);
  for (const ServerNode& n : w.infra.nodes) {
    CHECK(n.capacity >= 100.0);
    CHECK(n.capacity <= 200.0);
    CHECK(n.availability >= 0.99);
    CHECK(n.srng.size() <= 5);
  }
  for (const PlacementRequest& req : w.requests) {
    CHECK(req.k() >= 3);
    CHECK(req.k() <= 5);
    for (const Vm& vm : req.vms) {
      CHECK(vm.demand >= 60.0);
      CHECK(vm.demand <= 130.0);
    }
    CHECK(req.delta >= 0.999);
    for (int i = 0; i < req.k(); ++i)
      for (int j = i + 1; j < req.k(); ++j) {
        CHECK(req.delay_req[i][j] >= 15.0);
        CHECK(req.delay_req[i][j] <= 25.0);
        CHECK(req.avail_req[i][j] >= 0.999);
      }
  }
}

TEST_CASE("risk wiring is orthogonal to everything else", "[harness]") {
  PlacementWorkloadSpec plain;
  plain.node_count = 30;
  plain.request_count = 25;
  plain.seed = 11;
  plain.with_srng = false;
  PlacementWorkloadSpec risky = plain;
  risky.with_srng = true;

  PlacementWorkload a = gen_placement_workload(plain);
  PlacementWorkload b = gen_placement_workload(risky);

  CHECK(a.infra.srng_events.empty());
  CHECK(b.infra.srng_events.size() == 15);
  REQUIRE(a.infra.nodes.size() == b.infra.nodes.size());
  for (std::size_t i = 0; i < a.infra.nodes.size(); ++i) {
    CHECK(a.infra.nodes[i].id == b.infra.nodes[i].id);
    CHECK(a.infra.nodes[i].capacity == b.infra.nodes[i].capacity);
    CHECK(a.infra.nodes[i].availability == b.infra.nodes[i].availability);
    CHECK(a.infra.nodes[i].srng.empty());
  }
  REQUIRE(a.requests.size() == b.requests.size());
  for (std::size_t i = 0; i < a.requests.size(); ++i)
    CHECK(placement_request_to_json(a.requests[i]) ==
          placement_request_to_json(b.requests[i]));
}

TEST_CASE("placement experiment rows and aggregates", "[harness]") {
  PlacementWorkloadSpec spec;
  spec.node_count = 16;
  spec.request_count = 30;
  spec.seed = 3;
  PlacementWorkload w = gen_placement_workload(spec);

  ExperimentReport rep = run_placement_experiment(w, {"dsr", "gp", "rp"}, {2, 3});
  REQUIRE(rep.rows.size() == 3u * 2u * 30u);

  ExperimentReport again =
      run_placement_experiment(w, {"dsr", "gp", "rp"}, {2, 3});
  CHECK(rows_equal_ignoring_runtime(rep.rows, again.rows));

  REQUIRE(rep.aggregates.count("dsr_H2") == 1);
  REQUIRE(rep.aggregates.count("dsr_H3") == 1);
  for (const auto& [name, agg] : rep.aggregates) {
    INFO(name);
    CHECK(agg.total == 30);
    CHECK(agg.acceptance_ratio >= 0.0);
    CHECK(agg.acceptance_ratio <= 1.0);
    CHECK(agg.has_mean_used_nodes == (agg.accepted > 0));
  }

  // a larger group budget never hurts any solver
  for (std::string algo : {"dsr", "gp", "rp"})
    CHECK(rep.aggregates[algo + "_H3"].acceptance_ratio >=
          rep.aggregates[algo + "_H2"].acceptance_ratio);

  // the workload is neither trivially easy nor impossible for the heuristic
  CHECK(rep.aggregates["dsr_H3"].accepted > 0);

  CHECK_THROWS_AS(run_placement_experiment(w, {"nope"}, {2}), ArgumentError);
  CHECK_THROWS_AS(run_placement_experiment(w, {"dsr"}, {}), ArgumentError);
  CHECK_THROWS_AS(run_placement_experiment(w, {"dsr"}, {0}), ArgumentError);
}

TEST_CASE("routing workload and experiment", "[harness]") {
  RoutingWorkloadSpec spec;
  spec.node_count = 12;
  spec.extra_links = 4;
  spec.request_count = 30;
  spec.seed = 5;
  RoutingWorkload w = gen_routing_workload(spec);
  REQUIRE(w.net.node_ids.size() == 12);
  REQUIRE(w.net.links.size() >= 11);
  REQUIRE(w.requests.size() == 30);
  for (std::size_t i = 0; i < w.requests.size(); ++i) {
    CHECK(w.requests[i].s != w.requests[i].t);
    CHECK(w.requests[i].w >= 1);
    CHECK(w.requests[i].w <= 3);
    CHECK(w.label_caps[i] ==
          static_cast<std::size_t>(w.requests[i].w) * 12u);
  }

  RoutingWorkload w2 = gen_routing_workload(spec);
  CHECK(network_to_json(w.net) == network_to_json(w2.net));

  ExperimentReport rep =
      run_routing_experiment(w, {"exact", "tadra", "seq_tamcra", "slf"});
  REQUIRE(rep.rows.size() == 4u * 30u);

  ExperimentReport again =
      run_routing_experiment(w, {"exact", "tadra", "seq_tamcra", "slf"});
  CHECK(rows_equal_ignoring_runtime(rep.rows, again.rows));

  // rows come out grouped per algorithm in request order
  std::map<std::string, std::vector<ExperimentRow>> by_algo;
  for (const ExperimentRow& r : rep.rows) by_algo[r.algorithm].push_back(r);
  for (int i = 0; i < 30; ++i) {
    const ExperimentRow& exact = by_algo["exact"][static_cast<std::size_t>(i)];
    const ExperimentRow& capped = by_algo["tadra"][static_cast<std::size_t>(i)];
    const ExperimentRow& seq =
        by_algo["seq_tamcra"][static_cast<std::size_t>(i)];
    CHECK(capped.availability <= exact.availability + 1e-12);
    CHECK(seq.availability <= exact.availability + 1e-12);
    if (capped.accepted) CHECK(exact.accepted);
    if (seq.accepted) CHECK(exact.accepted);
  }
  CHECK(rep.aggregates["exact"].accepted > 0);

  CHECK_THROWS_AS(run_routing_experiment(w, {"dijkstra"}), ArgumentError);
}

TEST_CASE("oversized networks yield rejected rows instead of crashes",
          "[harness]") {
  RoutingWorkloadSpec spec;
  spec.node_count = 70;  // past the exact solver's hard limit
  spec.extra_links = 2;
  spec.request_count = 3;
  spec.seed = 1;
  RoutingWorkload w = gen_routing_workload(spec);
  ExperimentReport rep = run_routing_experiment(w, {"exact", "tadra"});
  REQUIRE(rep.rows.size() == 6);
  for (const ExperimentRow& r : rep.rows) {
    CHECK_FALSE(r.accepted);
    CHECK(r.availability == 0.0);
  }
  // the single-path baseline has no such limit and still runs
  ExperimentReport slf = run_routing_experiment(w, {"slf"});
  REQUIRE(slf.rows.size() == 3);
}

TEST_CASE("workload guards", "[harness][errors]") {
  PlacementWorkloadSpec p;
  p.node_count = 1;
  CHECK_THROWS_AS(gen_placement_workload(p), ArgumentError);
  RoutingWorkloadSpec r;
  r.request_count = -1;
  CHECK_THROWS_AS(gen_routing_workload(r), ArgumentError);
}
