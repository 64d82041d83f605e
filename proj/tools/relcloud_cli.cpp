/// Command-line front end for the relcloud library: placement and routing
/// solvers, compatibility-frontier precomputation, workload simulation, and
/// reference oracles, all speaking JSON in and JSON/CSV out.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "relcloud/relcloud.hpp"

namespace {

using relcloud::Json;

Json load_json(const std::string& file) { return relcloud::load_json_file(file); }

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw relcloud::ArgumentError("cannot open output file " + file);
  out << text;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::string pct(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// place
// ---------------------------------------------------------------------------

struct PlaceOpts {
  std::string infra_file;
  std::string request_file;
  std::string algo = "dsr";
  std::string failure_model = "multi";
  int H = 0;           // 0: keep the request's value
  double alpha = -1.0; // <0: keep the request's value
  std::uint64_t seed = 0;
  std::string out_file;
};

int run_place(const PlaceOpts& o) {
  relcloud::Infrastructure infra =
      relcloud::parse_infrastructure(load_json(o.infra_file), "infrastructure");
  relcloud::PlacementRequest req =
      relcloud::parse_placement_request(load_json(o.request_file), "request");
  if (o.H > 0) req.H = o.H;
  if (o.alpha >= 0.0) req.alpha = o.alpha;

  relcloud::FailureModel model = relcloud::FailureModel::multi;
  if (o.failure_model == "single-node") {
    if (o.algo != "exact")
      throw relcloud::ArgumentError(
          "--failure-model single-node is only supported by --algo exact");
    model = relcloud::FailureModel::single_node;
  }

  relcloud::PlacementOutcome out;
  if (o.algo == "exact") {
    out = relcloud::exact_place(infra, req, model);
  } else if (o.algo == "dsr") {
    out = relcloud::dsr(infra, req);
  } else if (o.algo == "gp") {
    out = relcloud::baseline_place(infra, req,
                                   relcloud::BaselineStrategy::greedy, o.seed);
  } else {
    out = relcloud::baseline_place(infra, req,
                                   relcloud::BaselineStrategy::random, o.seed);
  }

  if (out.accepted) {
    std::cout << "accepted: yes\n";
    std::cout << "used nodes: " << out.used_nodes.size() << " (";
    for (std::size_t i = 0; i < out.used_nodes.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << infra.nodes[static_cast<std::size_t>(out.used_nodes[i])].id;
    }
    std::cout << ")\n";
    std::cout << "availability: " << pct(out.availability) << "\n";
  } else {
    std::cout << "accepted: no\n";
    std::cout << "availability target " << pct(req.delta)
              << " not reachable with the given algorithm\n";
  }
  std::cout << "runtime_us: " << out.runtime.count() << "\n";

  if (!o.out_file.empty())
    write_text(o.out_file,
               relcloud::placement_outcome_to_json(infra, out).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// route
// ---------------------------------------------------------------------------

struct RouteOpts {
  std::string net_file;
  std::string request_file;
  std::string algo = "exact";
  int w = 0;              // 0: keep the request's value
  std::int64_t M = 0;     // 0: default w * N
  std::string out_file;
};

int run_route(const RouteOpts& o) {
  relcloud::Network net =
      relcloud::parse_network(load_json(o.net_file), "network");
  relcloud::RouteRequest req =
      relcloud::parse_route_request(load_json(o.request_file), net, "request");
  if (o.w > 0) req.w = o.w;

  relcloud::RouteOutcome out;
  if (o.algo == "exact") {
    out = relcloud::route_exact(net, req);
  } else if (o.algo == "tadra") {
    std::size_t cap = o.M > 0
                          ? static_cast<std::size_t>(o.M)
                          : static_cast<std::size_t>(req.w) * net.node_ids.size();
    out = relcloud::tadra(net, req, cap);
  } else if (o.algo == "seq_tamcra") {
    out = relcloud::seq_tamcra(net, req);
  } else if (o.algo == "slf") {
    req.w = 1;  // this baseline always routes exactly one path
    out = relcloud::route_single_link_failure(net, req);
  } else {
    out = relcloud::brute_force_route(net, req);
  }

  if (out.accepted) {
    std::cout << "accepted: yes\n";
    std::cout << "paths: " << out.paths.size() << "\n";
    for (std::size_t p = 0; p < out.paths.size(); ++p) {
      std::cout << "  path " << p + 1 << ":";
      for (int l : out.paths[p]) {
        const auto& link = net.links[static_cast<std::size_t>(l)];
        std::cout << " " << net.node_ids[static_cast<std::size_t>(link.u)]
                  << "-" << net.node_ids[static_cast<std::size_t>(link.v)];
      }
      std::cout << "\n";
    }
    std::cout << "availability: " << pct(out.availability) << "\n";
  } else {
    std::cout << "accepted: no\n";
    std::cout << "best availability reached: " << pct(out.availability)
              << " (target " << pct(req.eta) << ")\n";
  }
  std::cout << "runtime_us: " << out.runtime.count() << "\n";

  if (!o.out_file.empty())
    write_text(o.out_file,
               relcloud::route_outcome_to_json(net, out).dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// compat
// ---------------------------------------------------------------------------

struct CompatOpts {
  std::string infra_file;
  std::string net_file;
  std::string attach_csv;
  std::string delays_csv = "10,15,20,25,30";
  int w = 1;
  std::string out_file;
};

int run_compat(const CompatOpts& o) {
  relcloud::Infrastructure infra =
      relcloud::parse_infrastructure(load_json(o.infra_file), "infrastructure");
  relcloud::Network net =
      relcloud::parse_network(load_json(o.net_file), "network");

  std::vector<int> attach;
  for (const std::string& token : split_list(o.attach_csv)) {
    bool numeric = !token.empty() &&
                   token.find_first_not_of("0123456789") == std::string::npos;
    attach.push_back(numeric ? std::stoi(token) : net.node_index(token));
  }

  std::vector<double> delays;
  for (const std::string& token : split_list(o.delays_csv))
    delays.push_back(std::stod(token));
  if (delays.empty())
    throw relcloud::ArgumentError("--delays needs at least one value");

  relcloud::fill_compat_from_network(infra, net, attach, delays, o.w);

  std::string doc = relcloud::infrastructure_to_json(infra).dump(2) + "\n";
  if (o.out_file.empty()) {
    std::cout << doc;
  } else {
    write_text(o.out_file, doc);
    std::size_t pairs = 0;
    for (const auto& [key, frontier] : infra.compat)
      if (!frontier.empty()) ++pairs;
    std::cout << "wrote " << o.out_file << " with frontiers for " << pairs
              << " node pairs\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string spec_file;
  std::string algos_csv;
  std::string h_csv = "2,3";
  std::string out_file;
};

void print_aggregates(const relcloud::ExperimentReport& report) {
  for (const auto& [name, agg] : report.aggregates) {
    std::cerr << name << ": AR " << pct(agg.acceptance_ratio) << " ("
              << agg.accepted << "/" << agg.total << ")";
    if (agg.has_mean_used_nodes)
      std::cerr << ", mean used nodes " << pct(agg.mean_used_nodes);
    std::cerr << ", mean runtime_us " << pct(agg.mean_runtime_us) << "\n";
  }
}

int run_simulate_placement(const SimulateOpts& o) {
  relcloud::PlacementWorkloadSpec spec = relcloud::parse_placement_workload_spec(
      load_json(o.spec_file), "spec");
  std::vector<std::string> algos =
      split_list(o.algos_csv.empty() ? "dsr,gp,rp" : o.algos_csv);
  std::vector<int> h_values;
  for (const std::string& token : split_list(o.h_csv))
    h_values.push_back(std::stoi(token));

  relcloud::PlacementWorkload w = relcloud::gen_placement_workload(spec);
  relcloud::ExperimentReport report =
      relcloud::run_placement_experiment(w, algos, h_values);

  if (o.out_file.empty()) {
    std::cout << relcloud::rows_to_csv(report.rows);
  } else {
    relcloud::write_csv_file(o.out_file, report.rows);
    std::cout << "wrote " << report.rows.size() << " rows to " << o.out_file
              << "\n";
  }
  print_aggregates(report);
  return 0;
}

int run_simulate_routing(const SimulateOpts& o) {
  relcloud::RoutingWorkloadSpec spec = relcloud::parse_routing_workload_spec(
      load_json(o.spec_file), "spec");
  std::vector<std::string> algos = split_list(
      o.algos_csv.empty() ? "exact,tadra,seq_tamcra,slf" : o.algos_csv);

  relcloud::RoutingWorkload w = relcloud::gen_routing_workload(spec);
  relcloud::ExperimentReport report =
      relcloud::run_routing_experiment(w, algos);

  if (o.out_file.empty()) {
    std::cout << relcloud::rows_to_csv(report.rows);
  } else {
    relcloud::write_csv_file(o.out_file, report.rows);
    std::cout << "wrote " << report.rows.size() << " rows to " << o.out_file
              << "\n";
  }
  print_aggregates(report);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleAvailOpts {
  std::string groups_file;
  std::uint64_t mc_samples = 0;  // 0: skip the Monte Carlo line
  std::uint64_t seed = 0;
};

int run_oracle_avail(const OracleAvailOpts& o) {
  relcloud::AvailabilityDoc doc =
      relcloud::parse_availability_doc(load_json(o.groups_file), "groups");
  double closed =
      relcloud::multi_group_availability(doc.universe, doc.groups);
  double brute =
      relcloud::brute_force_availability(doc.universe, doc.groups);
  std::cout << "closed_form: " << pct(closed) << "\n";
  std::cout << "brute_force: " << pct(brute) << "\n";
  if (o.mc_samples > 0) {
    double mc = relcloud::monte_carlo_availability(doc.universe, doc.groups,
                                                   o.mc_samples, o.seed);
    std::cout << "monte_carlo: " << pct(mc) << " (" << o.mc_samples
              << " samples, seed " << o.seed << ")\n";
  }
  return 0;
}

struct OracleRouteOpts {
  std::string net_file;
  std::string request_file;
};

int run_oracle_route(const OracleRouteOpts& o) {
  relcloud::Network net =
      relcloud::parse_network(load_json(o.net_file), "network");
  relcloud::RouteRequest req =
      relcloud::parse_route_request(load_json(o.request_file), net, "request");
  relcloud::RouteOutcome out = relcloud::brute_force_route(net, req);
  std::cout << "accepted: " << (out.accepted ? "yes" : "no") << "\n";
  std::cout << "paths: " << out.paths.size() << "\n";
  std::cout << "availability: " << pct(out.availability) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "relcloud: availability-aware VM placement and routing toolkit"};
  app.require_subcommand(1);

  PlaceOpts place;
  CLI::App* place_cmd =
      app.add_subcommand("place", "Place a VM request on an infrastructure");
  place_cmd->add_option("--infra", place.infra_file, "infrastructure JSON")
      ->required()
      ->check(CLI::ExistingFile);
  place_cmd->add_option("--request", place.request_file, "placement request JSON")
      ->required()
      ->check(CLI::ExistingFile);
  place_cmd->add_option("--algo", place.algo, "solver: exact, dsr, gp, rp")
      ->check(CLI::IsMember({"exact", "dsr", "gp", "rp"}))
      ->capture_default_str();
  place_cmd
      ->add_option("--failure-model", place.failure_model,
                   "failure semantics: multi or single-node")
      ->check(CLI::IsMember({"multi", "single-node"}))
      ->capture_default_str();
  place_cmd->add_option("--H", place.H, "override the request's group budget")
      ->check(CLI::PositiveNumber);
  place_cmd->add_option("--alpha", place.alpha,
                        "override the request's delay-requirement scale");
  place_cmd->add_option("--seed", place.seed, "seed for the randomized baseline");
  place_cmd->add_option("--out", place.out_file, "write the outcome JSON here");

  RouteOpts route;
  CLI::App* route_cmd =
      app.add_subcommand("route", "Route a request across a network");
  route_cmd->add_option("--net", route.net_file, "network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  route_cmd->add_option("--request", route.request_file, "route request JSON")
      ->required()
      ->check(CLI::ExistingFile);
  route_cmd
      ->add_option("--algo", route.algo,
                   "solver: exact, tadra, seq_tamcra, slf, brute")
      ->check(CLI::IsMember({"exact", "tadra", "seq_tamcra", "slf", "brute"}))
      ->capture_default_str();
  route_cmd->add_option("--w", route.w, "override the request's path budget")
      ->check(CLI::PositiveNumber);
  route_cmd->add_option("--M", route.M,
                        "label budget for tadra (default: w times node count)")
      ->check(CLI::PositiveNumber);
  route_cmd->add_option("--out", route.out_file, "write the outcome JSON here");

  CompatOpts compat;
  CLI::App* compat_cmd = app.add_subcommand(
      "compat",
      "Precompute inter-node availability/delay frontiers from a network");
  compat_cmd->add_option("--infra", compat.infra_file, "infrastructure JSON")
      ->required()
      ->check(CLI::ExistingFile);
  compat_cmd->add_option("--net", compat.net_file, "network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  compat_cmd
      ->add_option("--attach", compat.attach_csv,
                   "comma list of network nodes, one per server node")
      ->required();
  compat_cmd
      ->add_option("--delays", compat.delays_csv,
                   "comma list of delay bounds to probe")
      ->capture_default_str();
  compat_cmd
      ->add_option("--w", compat.w, "path budget per frontier point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  compat_cmd->add_option("--out", compat.out_file,
                         "write the enriched infrastructure here");

  SimulateOpts sim_place;
  SimulateOpts sim_route;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Run a synthetic workload experiment");
  sim_cmd->require_subcommand(1);
  CLI::App* sim_place_cmd = sim_cmd->add_subcommand(
      "placement", "Placement workload: CSV row per (algorithm, request)");
  sim_place_cmd->add_option("--spec", sim_place.spec_file, "workload spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim_place_cmd->add_option("--algos", sim_place.algos_csv,
                            "comma list of exact, dsr, gp, rp (default dsr,gp,rp)");
  sim_place_cmd
      ->add_option("--H", sim_place.h_csv, "comma list of group budgets")
      ->capture_default_str();
  sim_place_cmd->add_option("--out", sim_place.out_file,
                            "CSV output file (default: stdout)");
  CLI::App* sim_route_cmd = sim_cmd->add_subcommand(
      "routing", "Routing workload: CSV row per (algorithm, request)");
  sim_route_cmd->add_option("--spec", sim_route.spec_file, "workload spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim_route_cmd->add_option(
      "--algos", sim_route.algos_csv,
      "comma list of exact, tadra, seq_tamcra, slf (default all)");
  sim_route_cmd->add_option("--out", sim_route.out_file,
                            "CSV output file (default: stdout)");

  OracleAvailOpts oracle_avail;
  OracleRouteOpts oracle_route;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Reference computations for verification");
  oracle_cmd->require_subcommand(1);
  CLI::App* oracle_avail_cmd = oracle_cmd->add_subcommand(
      "avail", "Closed-form and brute-force availability of an atom-group file");
  oracle_avail_cmd
      ->add_option("--groups", oracle_avail.groups_file, "atom-group JSON")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_avail_cmd->add_option("--mc-samples", oracle_avail.mc_samples,
                               "also print a Monte Carlo estimate");
  oracle_avail_cmd->add_option("--seed", oracle_avail.seed,
                               "Monte Carlo seed");
  CLI::App* oracle_route_cmd = oracle_cmd->add_subcommand(
      "route", "Exhaustive best path set for a route request");
  oracle_route_cmd->add_option("--net", oracle_route.net_file, "network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_route_cmd
      ->add_option("--request", oracle_route.request_file, "route request JSON")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (place_cmd->parsed()) return run_place(place);
    if (route_cmd->parsed()) return run_route(route);
    if (compat_cmd->parsed()) return run_compat(compat);
    if (sim_place_cmd->parsed()) return run_simulate_placement(sim_place);
    if (sim_route_cmd->parsed()) return run_simulate_routing(sim_route);
    if (oracle_avail_cmd->parsed()) return run_oracle_avail(oracle_avail);
    if (oracle_route_cmd->parsed()) return run_oracle_route(oracle_route);
  } catch (const relcloud::ParseError& e) {
    std::cerr << "input error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
