#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "relcloud/availability.hpp"
#include "relcloud/errors.hpp"
#include "relcloud/harness.hpp"
#include "relcloud/infrastructure.hpp"
#include "relcloud/network.hpp"
#include "relcloud/placement.hpp"

namespace relcloud {

using Json = nlohmann::json;

namespace detail {

inline std::string json_child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

inline std::string json_child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

inline const Json& member(const Json& j, const char* key,
                          const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(json_child(path, key), "missing field");
  return *it;
}

inline const Json* opt_member(const Json& j, const char* key,
                              const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

inline double num_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

inline int int_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

inline std::uint64_t uint_at(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw ParseError(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(j.get<std::int64_t>());
}

inline bool bool_at(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path, "expected a boolean");
  return j.get<bool>();
}

inline std::string str_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

inline const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  return j;
}

inline std::vector<int> int_list_at(const Json& j, const std::string& path) {
  array_at(j, path);
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(int_at(j[i], json_child(path, i)));
  return out;
}

inline std::vector<std::vector<double>> matrix_at(const Json& j,
                                                  const std::string& path) {
  array_at(j, path);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_path = json_child(path, i);
    array_at(j[i], row_path);
    std::vector<double> row;
    for (std::size_t c = 0; c < j[i].size(); ++c)
      row.push_back(num_at(j[i][c], json_child(row_path, c)));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace detail

/// Reads a whole JSON document from disk; failures carry the file name.
inline Json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file, "cannot open file");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(file, "invalid JSON");
  return j;
}

// ---------------------------------------------------------------------------
// Infrastructure documents
// ---------------------------------------------------------------------------

inline Infrastructure parse_infrastructure(const Json& j,
                                           const std::string& path = "") {
  Infrastructure infra;
  if (const Json* events = detail::opt_member(j, "srng_events", path)) {
    const std::string epath = detail::json_child(path, "srng_events");
    detail::array_at(*events, epath);
    for (std::size_t i = 0; i < events->size(); ++i) {
      const std::string ep = detail::json_child(epath, i);
      SrngEvent ev;
      ev.id = detail::str_at(detail::member((*events)[i], "id", ep),
                             detail::json_child(ep, "id"));
      ev.failure_prob =
          detail::num_at(detail::member((*events)[i], "failure_prob", ep),
                         detail::json_child(ep, "failure_prob"));
      infra.srng_events.push_back(std::move(ev));
    }
  }

  const Json& nodes = detail::member(j, "nodes", path);
  const std::string npath = detail::json_child(path, "nodes");
  detail::array_at(nodes, npath);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string np = detail::json_child(npath, i);
    ServerNode node;
    node.id = detail::str_at(detail::member(nodes[i], "id", np),
                             detail::json_child(np, "id"));
    node.capacity = detail::num_at(detail::member(nodes[i], "capacity", np),
                                   detail::json_child(np, "capacity"));
    node.availability =
        detail::num_at(detail::member(nodes[i], "availability", np),
                       detail::json_child(np, "availability"));
    if (const Json* srng = detail::opt_member(nodes[i], "srng", np))
      node.srng = detail::int_list_at(*srng, detail::json_child(np, "srng"));
    infra.nodes.push_back(std::move(node));
  }

  if (const Json* compat = detail::opt_member(j, "compat", path)) {
    const std::string opath = detail::json_child(path, "compat");
    const Json& pairs = detail::member(*compat, "pairs", opath);
    const std::string cpath = detail::json_child(opath, "pairs");
    detail::array_at(pairs, cpath);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string cp = detail::json_child(cpath, i);
      const Json& ja = detail::member(pairs[i], "a", cp);
      const Json& jb = detail::member(pairs[i], "b", cp);
      int a = ja.is_string() ? infra.node_index(ja.get<std::string>())
                             : detail::int_at(ja, detail::json_child(cp, "a"));
      int b = jb.is_string() ? infra.node_index(jb.get<std::string>())
                             : detail::int_at(jb, detail::json_child(cp, "b"));
      const int count = static_cast<int>(infra.nodes.size());
      if (a < 0 || a >= count)
        throw ParseError(detail::json_child(cp, "a"), "node index out of range");
      if (b < 0 || b >= count || b == a)
        throw ParseError(detail::json_child(cp, "b"), "node index out of range");
      const Json& fr = detail::member(pairs[i], "frontier", cp);
      const std::string fpath = detail::json_child(cp, "frontier");
      detail::array_at(fr, fpath);
      std::vector<FrontierPoint> points;
      for (std::size_t p = 0; p < fr.size(); ++p) {
        const std::string pp = detail::json_child(fpath, p);
        FrontierPoint point;
        point.availability =
            detail::num_at(detail::member(fr[p], "availability", pp),
                           detail::json_child(pp, "availability"));
        point.delay = detail::num_at(detail::member(fr[p], "delay", pp),
                                     detail::json_child(pp, "delay"));
        points.push_back(point);
      }
      infra.set_frontier(a, b, std::move(points));
    }
  }

  infra.check();
  return infra;
}

inline Json infrastructure_to_json(const Infrastructure& infra) {
  Json j = Json::object();
  j["nodes"] = Json::array();
  for (const ServerNode& n : infra.nodes) {
    Json node{{"id", n.id},
              {"capacity", n.capacity},
              {"availability", n.availability}};
    if (!n.srng.empty()) node["srng"] = n.srng;
    j["nodes"].push_back(std::move(node));
  }
  if (!infra.srng_events.empty()) {
    j["srng_events"] = Json::array();
    for (const SrngEvent& e : infra.srng_events)
      j["srng_events"].push_back(
          {{"id", e.id}, {"failure_prob", e.failure_prob}});
  }
  if (!infra.compat.empty()) {
    Json pairs = Json::array();
    const int count = static_cast<int>(infra.nodes.size());
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b) {
        auto it = infra.compat.find(infra.pair_key(a, b));
        if (it == infra.compat.end()) continue;
        Json pts = Json::array();
        for (const FrontierPoint& p : it->second)
          pts.push_back({{"availability", p.availability}, {"delay", p.delay}});
        pairs.push_back({{"a", a}, {"b", b}, {"frontier", std::move(pts)}});
      }
    j["compat"] = Json{{"pairs", std::move(pairs)}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Network documents
// ---------------------------------------------------------------------------

inline Network parse_network(const Json& j, const std::string& path = "") {
  Network net;
  const Json& nodes = detail::member(j, "nodes", path);
  const std::string npath = detail::json_child(path, "nodes");
  detail::array_at(nodes, npath);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    net.node_ids.push_back(
        detail::str_at(nodes[i], detail::json_child(npath, i)));

  if (const Json* events = detail::opt_member(j, "srlg_events", path)) {
    const std::string epath = detail::json_child(path, "srlg_events");
    detail::array_at(*events, epath);
    for (std::size_t i = 0; i < events->size(); ++i) {
      const std::string ep = detail::json_child(epath, i);
      SrngEvent ev;
      ev.id = detail::str_at(detail::member((*events)[i], "id", ep),
                             detail::json_child(ep, "id"));
      ev.failure_prob =
          detail::num_at(detail::member((*events)[i], "failure_prob", ep),
                         detail::json_child(ep, "failure_prob"));
      net.srlg_events.push_back(std::move(ev));
    }
  }

  const Json& links = detail::member(j, "links", path);
  const std::string lpath = detail::json_child(path, "links");
  detail::array_at(links, lpath);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string lp = detail::json_child(lpath, i);
    NetLink link;
    link.id = detail::str_at(detail::member(links[i], "id", lp),
                             detail::json_child(lp, "id"));
    const Json& u = detail::member(links[i], "u", lp);
    const Json& v = detail::member(links[i], "v", lp);
    link.u = u.is_string() ? net.node_index(u.get<std::string>())
                           : detail::int_at(u, detail::json_child(lp, "u"));
    link.v = v.is_string() ? net.node_index(v.get<std::string>())
                           : detail::int_at(v, detail::json_child(lp, "v"));
    link.availability =
        detail::num_at(detail::member(links[i], "availability", lp),
                       detail::json_child(lp, "availability"));
    link.delay = detail::num_at(detail::member(links[i], "delay", lp),
                                detail::json_child(lp, "delay"));
    if (const Json* srlg = detail::opt_member(links[i], "srlg", lp))
      link.srlg = detail::int_list_at(*srlg, detail::json_child(lp, "srlg"));
    net.links.push_back(std::move(link));
  }

  net.check();
  return net;
}

inline Json network_to_json(const Network& net) {
  Json j = Json::object();
  j["nodes"] = net.node_ids;
  j["links"] = Json::array();
  for (const NetLink& l : net.links) {
    Json link{{"id", l.id},
              {"u", l.u},
              {"v", l.v},
              {"availability", l.availability},
              {"delay", l.delay}};
    if (!l.srlg.empty()) link["srlg"] = l.srlg;
    j["links"].push_back(std::move(link));
  }
  if (!net.srlg_events.empty()) {
    j["srlg_events"] = Json::array();
    for (const SrngEvent& e : net.srlg_events)
      j["srlg_events"].push_back(
          {{"id", e.id}, {"failure_prob", e.failure_prob}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Request documents
// ---------------------------------------------------------------------------

inline PlacementRequest parse_placement_request(const Json& j,
                                                const std::string& path = "") {
  PlacementRequest req;
  const Json& vms = detail::member(j, "vms", path);
  const std::string vpath = detail::json_child(path, "vms");
  detail::array_at(vms, vpath);
  for (std::size_t i = 0; i < vms.size(); ++i) {
    const std::string vp = detail::json_child(vpath, i);
    Vm vm;
    vm.id = detail::str_at(detail::member(vms[i], "id", vp),
                           detail::json_child(vp, "id"));
    vm.demand = detail::num_at(detail::member(vms[i], "demand", vp),
                               detail::json_child(vp, "demand"));
    req.vms.push_back(std::move(vm));
  }
  req.avail_req = detail::matrix_at(detail::member(j, "avail_matrix", path),
                                    detail::json_child(path, "avail_matrix"));
  req.delay_req = detail::matrix_at(detail::member(j, "delay_matrix", path),
                                    detail::json_child(path, "delay_matrix"));
  req.delta = detail::num_at(detail::member(j, "delta", path),
                             detail::json_child(path, "delta"));
  if (const Json* h = detail::opt_member(j, "H", path))
    req.H = detail::int_at(*h, detail::json_child(path, "H"));
  if (const Json* a = detail::opt_member(j, "alpha", path))
    req.alpha = detail::num_at(*a, detail::json_child(path, "alpha"));
  req.check();
  return req;
}

inline Json placement_request_to_json(const PlacementRequest& req) {
  Json j = Json::object();
  j["vms"] = Json::array();
  for (const Vm& vm : req.vms)
    j["vms"].push_back({{"id", vm.id}, {"demand", vm.demand}});
  j["avail_matrix"] = req.avail_req;
  j["delay_matrix"] = req.delay_req;
  j["delta"] = req.delta;
  j["H"] = req.H;
  j["alpha"] = req.alpha;
  return j;
}

/// Route endpoints accept either a node id string or a node index.
inline RouteRequest parse_route_request(const Json& j, const Network& net,
                                        const std::string& path = "") {
  RouteRequest req;
  const Json& s = detail::member(j, "s", path);
  const Json& t = detail::member(j, "t", path);
  req.s = s.is_string() ? net.node_index(s.get<std::string>())
                        : detail::int_at(s, detail::json_child(path, "s"));
  req.t = t.is_string() ? net.node_index(t.get<std::string>())
                        : detail::int_at(t, detail::json_child(path, "t"));
  req.eta = detail::num_at(detail::member(j, "eta", path),
                           detail::json_child(path, "eta"));
  req.max_delay = detail::num_at(detail::member(j, "max_delay", path),
                                 detail::json_child(path, "max_delay"));
  if (const Json* w = detail::opt_member(j, "w", path))
    req.w = detail::int_at(*w, detail::json_child(path, "w"));
  req.check(net);
  return req;
}

// ---------------------------------------------------------------------------
// Free-standing availability documents
// ---------------------------------------------------------------------------

struct AvailabilityDoc {
  AtomUniverse universe;
  std::vector<AtomGroup> groups;
};

/// {"atoms": [{"id", "up_prob", optional "kind"}], "groups": [["id", ...]]}
inline AvailabilityDoc parse_availability_doc(const Json& j,
                                              const std::string& path = "") {
  AvailabilityDoc doc;
  const Json& atoms = detail::member(j, "atoms", path);
  const std::string apath = detail::json_child(path, "atoms");
  detail::array_at(atoms, apath);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string ap = detail::json_child(apath, i);
    std::string id = detail::str_at(detail::member(atoms[i], "id", ap),
                                    detail::json_child(ap, "id"));
    double up = detail::num_at(detail::member(atoms[i], "up_prob", ap),
                               detail::json_child(ap, "up_prob"));
    AtomKind kind = AtomKind::node;
    if (const Json* k = detail::opt_member(atoms[i], "kind", ap)) {
      std::string ks = detail::str_at(*k, detail::json_child(ap, "kind"));
      if (ks == "node")
        kind = AtomKind::node;
      else if (ks == "link")
        kind = AtomKind::link;
      else if (ks == "srng_event")
        kind = AtomKind::srng_event;
      else
        throw ParseError(detail::json_child(ap, "kind"), "unknown atom kind");
    }
    doc.universe.add_atom(std::move(id), kind, up);
  }

  const Json& groups = detail::member(j, "groups", path);
  const std::string gpath = detail::json_child(path, "groups");
  detail::array_at(groups, gpath);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string gp = detail::json_child(gpath, g);
    detail::array_at(groups[g], gp);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < groups[g].size(); ++i)
      ids.push_back(detail::str_at(groups[g][i], detail::json_child(gp, i)));
    doc.groups.push_back(AtomGroup::from_ids(doc.universe, ids));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Workload specs
// ---------------------------------------------------------------------------

inline PlacementWorkloadSpec parse_placement_workload_spec(
    const Json& j, const std::string& path = "") {
  PlacementWorkloadSpec spec;
  if (const Json* v = detail::opt_member(j, "node_count", path))
    spec.node_count = detail::int_at(*v, detail::json_child(path, "node_count"));
  if (const Json* v = detail::opt_member(j, "request_count", path))
    spec.request_count =
        detail::int_at(*v, detail::json_child(path, "request_count"));
  if (const Json* v = detail::opt_member(j, "seed", path))
    spec.seed = detail::uint_at(*v, detail::json_child(path, "seed"));
  if (const Json* v = detail::opt_member(j, "with_srng", path))
    spec.with_srng = detail::bool_at(*v, detail::json_child(path, "with_srng"));
  if (const Json* v = detail::opt_member(j, "srng_event_count", path))
    spec.srng_event_count =
        detail::int_at(*v, detail::json_child(path, "srng_event_count"));
  if (const Json* v = detail::opt_member(j, "alpha", path))
    spec.alpha = detail::num_at(*v, detail::json_child(path, "alpha"));
  return spec;
}

inline RoutingWorkloadSpec parse_routing_workload_spec(
    const Json& j, const std::string& path = "") {
  RoutingWorkloadSpec spec;
  if (const Json* v = detail::opt_member(j, "node_count", path))
    spec.node_count = detail::int_at(*v, detail::json_child(path, "node_count"));
  if (const Json* v = detail::opt_member(j, "extra_links", path))
    spec.extra_links =
        detail::int_at(*v, detail::json_child(path, "extra_links"));
  if (const Json* v = detail::opt_member(j, "request_count", path))
    spec.request_count =
        detail::int_at(*v, detail::json_child(path, "request_count"));
  if (const Json* v = detail::opt_member(j, "seed", path))
    spec.seed = detail::uint_at(*v, detail::json_child(path, "seed"));
  if (const Json* v = detail::opt_member(j, "with_srlg", path))
    spec.with_srlg = detail::bool_at(*v, detail::json_child(path, "with_srlg"));
  return spec;
}

// ---------------------------------------------------------------------------
// Outcome documents (CLI output)
// ---------------------------------------------------------------------------

inline Json placement_outcome_to_json(const Infrastructure& infra,
                                      const PlacementOutcome& out) {
  Json j = Json::object();
  j["accepted"] = out.accepted;
  j["availability"] = out.availability;
  j["runtime_us"] = out.runtime.count();
  j["groups"] = Json::array();
  for (const std::vector<int>& group : out.assignment.groups) {
    Json g = Json::array();
    for (int node : group)
      g.push_back(node < 0 ? Json(nullptr)
                           : Json(infra.nodes[static_cast<std::size_t>(node)].id));
    j["groups"].push_back(std::move(g));
  }
  Json used = Json::array();
  for (int node : out.used_nodes)
    used.push_back(infra.nodes[static_cast<std::size_t>(node)].id);
  j["used_nodes"] = std::move(used);
  return j;
}

inline Json route_outcome_to_json(const Network& net, const RouteOutcome& out) {
  Json j = Json::object();
  j["accepted"] = out.accepted;
  j["availability"] = out.availability;
  j["runtime_us"] = out.runtime.count();
  j["paths"] = Json::array();
  for (const std::vector<int>& path : out.paths) {
    Json p = Json::array();
    for (int l : path) p.push_back(net.links[static_cast<std::size_t>(l)].id);
    j["paths"].push_back(std::move(p));
  }
  return j;
}

inline Json frontier_to_json(const std::vector<FrontierPoint>& frontier) {
  Json j = Json::array();
  for (const FrontierPoint& p : frontier)
    j.push_back({{"availability", p.availability}, {"delay", p.delay}});
  return j;
}

// ---------------------------------------------------------------------------
// CSV result tables
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_field(const std::string& raw) {
  bool needs_quotes = raw.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace detail

inline constexpr const char* kResultCsvHeader =
    "algorithm,seed,request_id,accepted,used_nodes,availability,runtime_us";

/// Serializes result rows as CSV with CRLF line endings.
inline std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = kResultCsvHeader;
  out += "\r\n";
  for (const ExperimentRow& r : rows) {
    out += detail::csv_field(r.algorithm);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.request_id);
    out += ',';
    out += r.accepted ? '1' : '0';
    out += ',';
    out += std::to_string(r.used_nodes);
    out += ',';
    out += detail::csv_double(r.availability);
    out += ',';
    out += std::to_string(r.runtime_us);
    out += "\r\n";
  }
  return out;
}

/// Writes the CSV in binary mode so line endings survive untouched.
inline void write_csv_file(const std::string& file,
                           const std::vector<ExperimentRow>& rows) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ArgumentError("cannot open output file " + file);
  out << rows_to_csv(rows);
}

}  // namespace relcloud
