#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zext/certificate.hpp"
#include "zext/error.hpp"
#include "zext/extension.hpp"
#include "zext/graph.hpp"
#include "zext/instance.hpp"
#include "zext/split.hpp"

namespace zext {

using Json = nlohmann::ordered_json;

inline constexpr int kInstanceFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

inline Json to_json(const Graph& g) {
  Json j;
  j["vertex_count"] = g.vertex_count();
  if (g.multigraph()) j["multigraph"] = true;
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  if (g.has_labels()) {
    Json labels = Json::array();
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      labels.push_back({g.label(g.edge(e).u, e), g.label(g.edge(e).v, e)});
    }
    j["labels"] = std::move(labels);
  }
  if (g.cayley()) {
    Json gens = Json::object();
    for (const auto& [sym, elem] : g.cayley()->generator) gens[std::to_string(sym)] = elem;
    j["cayley"] = {{"moduli", g.cayley()->moduli}, {"generators", std::move(gens)}};
  }
  return j;
}

inline Graph graph_from_json(const Json& j) {
  Graph g(j.at("vertex_count").get<std::size_t>(), j.value("multigraph", false));
  const auto& edges = j.at("edges");
  const bool labeled = j.contains("labels");
  if (labeled && j.at("labels").size() != edges.size()) fail("graph json: labels do not match edges");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto u = edges[e].at(0).get<VertexId>();
    const auto v = edges[e].at(1).get<VertexId>();
    if (u >= g.vertex_count() || v >= g.vertex_count()) fail("graph json: edge ", e, " out of range");
    if (labeled) {
      g.add_edge(u, v, j["labels"][e].at(0).get<Label>(), j["labels"][e].at(1).get<Label>());
    } else {
      g.add_edge(u, v);
    }
  }
  if (j.contains("cayley")) {
    CayleyStructure c;
    c.moduli = j["cayley"].at("moduli").get<std::vector<int>>();
    for (const auto& [sym, elem] : j["cayley"].at("generators").items()) {
      c.generator.emplace(std::stoi(sym), elem.get<std::vector<int>>());
    }
    g.set_cayley(std::move(c));
  }
  if (labeled) {
    if (auto bad = g.label_violation(); !bad.empty()) fail("graph json: ", bad);
  }
  return g;
}

inline Json to_json(const ExtendedGraph& x) {
  return {{"base", to_json(x.base())},
          {"base_lengths", std::vector<double>(x.base_lengths().values().begin(), x.base_lengths().values().end())},
          {"fiber", to_json(x.fiber())},
          {"fiber_lengths", std::vector<double>(x.fiber_lengths().values().begin(), x.fiber_lengths().values().end())},
          {"matchings", x.matchings()},
          {"seed", x.seed()}};
}

inline ExtendedGraph extension_from_json(const Json& j) {
  return ExtendedGraph(graph_from_json(j.at("base")), EdgeLengths(j.at("base_lengths").get<std::vector<double>>()),
                       graph_from_json(j.at("fiber")), EdgeLengths(j.at("fiber_lengths").get<std::vector<double>>()),
                       j.at("matchings").get<std::vector<std::vector<VertexId>>>(), j.at("seed").get<std::uint64_t>());
}

inline Json to_json(const GapParams& p) {
  return {{"n", p.n}, {"d", p.d}, {"ell_G", p.ell_G}, {"ell_H", p.ell_H}, {"L", p.L}};
}

inline Json to_json(const GapProvenance& p) {
  return {{"n", p.n},
          {"d", p.d},
          {"seed", p.seed},
          {"base_seed", p.base_seed},
          {"fiber_seed", p.fiber_seed},
          {"extension_seed", p.extension_seed},
          {"base_attempts", p.base_attempts},
          {"girth", p.girth},
          {"girth_floor", p.girth_floor},
          {"base_lambda2", p.base_lambda2},
          {"fiber_lambda2", p.fiber_lambda2},
          {"fiber_kind", p.fiber_kind},
          {"rng", p.rng},
          {"params", to_json(p.params)}};
}

// Gap instances store their origin (D is rebuilt on load); generic ones
// store D densely.
// Named apart from to_json: a Json second argument drags nlohmann's
// two-argument to_json into overload resolution.
inline Json instance_json(const ZeroExtInstance& inst, const Json& provenance = Json()) {
  Json j;
  j["format"] = "zext-instance";
  j["version"] = kInstanceFormatVersion;
  j["graph"] = to_json(inst.graph);
  j["weights"] = inst.weights;
  j["terminals"] = inst.terminals;
  if (inst.is_gap()) {
    j["metric"] = {{"kind", "lazy"}, {"L", inst.origin->L}, {"origin", to_json(*inst.origin->extension)}};
  } else {
    Json rows = Json::array();
    for (std::size_t a = 0; a < inst.terminal_count(); ++a) {
      const auto row = inst.metric.row(a);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["metric"] = {{"kind", "dense"}, {"values", std::move(rows)}};
  }
  if (!provenance.is_null()) j["provenance"] = provenance;
  return j;
}

inline Json to_json(const ZeroExtInstance& inst) { return instance_json(inst); }

inline ZeroExtInstance instance_from_json(const Json& j) {
  if (j.value("format", "") != "zext-instance") fail("instance json: missing format tag");
  if (j.value("version", 0) != kInstanceFormatVersion) fail("instance json: unsupported version ", j.value("version", 0));
  const auto& m = j.at("metric");
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "lazy") {
    auto x = std::make_shared<const ExtendedGraph>(extension_from_json(m.at("origin")));
    auto inst = build_gap_instance(x, m.at("L").get<double>());
    if (inst.graph != graph_from_json(j.at("graph")) || inst.weights != j.at("weights").get<std::vector<double>>()) {
      fail("instance json: graph or weights disagree with the stored origin");
    }
    return inst;
  }
  if (kind != "dense") fail("instance json: unknown metric kind '", kind, "'");
  const auto rows = m.at("values").get<std::vector<std::vector<double>>>();
  DistanceMatrix d(rows.size(), 0.0);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != rows.size()) fail("instance json: metric row ", a, " has wrong length");
    for (std::size_t b = 0; b < rows.size(); ++b) d(a, b) = rows[a][b];
  }
  return build_generic_instance(graph_from_json(j.at("graph")), j.at("weights").get<std::vector<double>>(),
                                j.at("terminals").get<std::vector<VertexId>>(), std::move(d));
}

inline Json to_json(const SplitReport& r) {
  Json j;
  j["format"] = "zext-split-report";
  j["version"] = kReportFormatVersion;
  j["ok"] = r.ok();
  j["parameters"] = {{"alpha", r.alpha}, {"epsilon", r.epsilon}, {"threshold", r.threshold}, {"n", r.n}};
  j["size"] = {{"ok", r.size_ok}, {"sub_edges", r.sub_edges}, {"base_edges", r.base_edges}, {"required", r.size_required}};
  j["cycle_homeomorphism"] = {{"ok", r.homeomorphism_ok},
                              {"witness_cycle", r.homeomorphism.witness_cycle},
                              {"odd_edges", r.homeomorphism.odd_edges}};
  Json dv = Json::array();
  for (const auto& v : r.distance_violations) dv.push_back({{"edge", v.edge}, {"distance", v.distance}});
  j["distance"] = {{"ok", r.distance_ok}, {"violations", std::move(dv)}};
  Json cv = Json::array();
  for (const auto& v : r.closeness_violations) cv.push_back({{"cloud", v.cloud}, {"hops", v.hops}});
  j["closeness"] = {{"ok", r.closeness_ok}, {"hop_limit", r.hop_limit}, {"violations", std::move(cv)}};
  return j;
}

inline std::string label_text(StepLabel l) {
  return (l.kind == StepKind::intra ? "h" : "g") + std::to_string(l.symbol);
}

inline StepLabel label_from_text(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'h' && s[0] != 'g')) fail("label '", s, "' is malformed");
  std::size_t used = 0;
  const int sym = std::stoi(s.substr(1), &used);
  if (used + 1 != s.size()) fail("label '", s, "' is malformed");
  return {s[0] == 'h' ? StepKind::intra : StepKind::inter, sym};
}

inline Json to_json(const Certificate& c) {
  Json j;
  j["format"] = "zext-certificate";
  j["version"] = c.version;
  j["mode"] = c.fiber_mode == LabelMode::cayley ? "cayley" : "edge_code";
  j["public"] = {{"base", to_json(c.base)}, {"fiber", to_json(c.fiber)}};
  j["subgraph"] = {{"vertices", c.sub.vertices}, {"edges", c.sub.edges}};
  Json reps = Json::array();
  for (const auto& r : c.representations) {
    Json walks = Json::array();
    Json diffs = Json::array();
    for (std::size_t a = 0; a < r.distinguished.size(); ++a) {
      for (std::size_t b = 0; b < r.distinguished.size(); ++b) {
        if (a == b) continue;
        walks.push_back({a, b, r.walks[a][b]});
        if (!r.differences.empty()) diffs.push_back({a, b, r.differences[a][b]});
      }
    }
    Json rj = {{"cloud", r.cloud}, {"distinguished", r.distinguished}, {"walks", std::move(walks)}};
    if (!r.differences.empty()) rj["differences"] = std::move(diffs);
    reps.push_back(std::move(rj));
  }
  j["representations"] = std::move(reps);
  Json skel = Json::array();
  for (const auto& p : c.skel.paths) {
    Json labels = Json::array();
    for (const auto& l : p.labels) labels.push_back(label_text(l));
    Json marks = Json::array();
    for (const auto& m : p.marks) marks.push_back(m ? Json{m->cloud, m->index} : Json());
    skel.push_back({{"labels", std::move(labels)}, {"marks", std::move(marks)}});
  }
  j["skeleton"] = std::move(skel);
  Json ids = Json::array();
  for (const auto& r : c.identities) ids.push_back({{"cloud", r.cloud}, {"rep_cloud", r.rep_cloud}, {"rep_fiber", r.rep_fiber}});
  j["representatives"] = std::move(ids);
  return j;
}

inline Certificate certificate_from_json(const Json& j) {
  if (j.value("format", "") != "zext-certificate") fail("certificate json: missing format tag");
  Certificate c;
  c.version = j.at("version").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode != "cayley" && mode != "edge_code") fail("certificate json: unknown mode '", mode, "'");
  c.fiber_mode = mode == "cayley" ? LabelMode::cayley : LabelMode::edge_code;
  c.base = graph_from_json(j.at("public").at("base"));
  c.fiber = graph_from_json(j.at("public").at("fiber"));
  c.sub.vertices = j.at("subgraph").at("vertices").get<std::vector<VertexId>>();
  c.sub.edges = j.at("subgraph").at("edges").get<std::vector<EdgeId>>();
  for (const auto& rj : j.at("representations")) {
    Representation r;
    r.cloud = rj.at("cloud").get<VertexId>();
    r.distinguished = rj.at("distinguished").get<std::vector<std::uint32_t>>();
    const std::size_t p = r.distinguished.size();
    r.walks.assign(p, std::vector<std::vector<Label>>(p));
    for (const auto& w : rj.at("walks")) {
      const auto a = w.at(0).get<std::size_t>();
      const auto b = w.at(1).get<std::size_t>();
      if (a >= p || b >= p) fail("certificate json: walk index out of range");
      r.walks[a][b] = w.at(2).get<std::vector<Label>>();
    }
    if (rj.contains("differences")) {
      r.differences.assign(p, std::vector<std::vector<int>>(p));
      for (const auto& d : rj.at("differences")) {
        const auto a = d.at(0).get<std::size_t>();
        const auto b = d.at(1).get<std::size_t>();
        if (a >= p || b >= p) fail("certificate json: difference index out of range");
        r.differences[a][b] = d.at(2).get<std::vector<int>>();
      }
    }
    c.representations.push_back(std::move(r));
  }
  for (const auto& pj : j.at("skeleton")) {
    SkeletonPath p;
    for (const auto& l : pj.at("labels")) p.labels.push_back(label_from_text(l.get<std::string>()));
    for (const auto& m : pj.at("marks")) {
      if (m.is_null()) {
        p.marks.emplace_back();
      } else {
        p.marks.emplace_back(FormalVertex{m.at(0).get<VertexId>(), m.at(1).get<std::uint32_t>()});
      }
    }
    c.skel.paths.push_back(std::move(p));
  }
  for (const auto& r : j.at("representatives")) {
    c.identities.push_back({r.at("cloud").get<VertexId>(), r.at("rep_cloud").get<VertexId>(), r.at("rep_fiber").get<VertexId>()});
  }
  return c;
}

inline Json to_json(const ICCGraph& g) {
  Json comps = Json::array();
  for (const auto& c : g.components) {
    comps.push_back({{"cloud", c.cloud},
                     {"distinguished", c.distinguished},
                     {"representatives", c.representatives},
                     {"degree", c.degree}});
  }
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"a", e.a.component}, {"b", e.b.component}, {"inter_steps", e.inter_steps},
                     {"base_edges", {e.a.base_edge, e.b.base_edge}}});
  }
  return {{"components", std::move(comps)}, {"edges", std::move(edges)}, {"s_tot", g.s_tot}};
}

inline Json to_json(const Diagnostics& d) {
  return {{"n", d.n},
          {"r_vertices", d.r_vertices},
          {"r_edges", d.r_edges},
          {"r_components", d.r_components},
          {"b1", d.b1},
          {"s_tot", d.s_tot},
          {"lower_stated", {{"value", d.lower_stated}, {"ok", d.lower_stated_ok}}},
          {"lower_counted", {{"value", d.lower_counted}, {"ok", d.lower_counted_ok}}},
          {"upper", {{"value", d.upper}, {"ok", d.upper_ok}}},
          {"betti_target", {{"value", d.betti_target}, {"met", d.betti_target_met}}},
          {"constraint_edges", d.constraints.size()},
          {"beta_sum_ok", d.beta_sum_ok},
          {"probability_bound", d.probability_bound},
          {"log10_probability_bound", d.log10_probability_bound}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '", path, "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail("'", path, "' is not valid JSON: ", e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail("cannot write '", path, "'");
  out << text;
  if (!out) fail("write to '", path, "' failed");
}

}  // namespace zext
