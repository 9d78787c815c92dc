#ifndef PQNET_REPORT_HPP
#define PQNET_REPORT_HPP

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqnet/analysis.hpp"
#include "pqnet/core_model.hpp"
#include "pqnet/model_io.hpp"

namespace pqnet {

namespace detail {

inline nlohmann::json matrix_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

inline nlohmann::json edge_json(const NetworkModel& model, const Edge& e) {
  return nlohmann::json::array({model.class_label(e.cls), model.station_label(e.station)});
}

/// Alternating vertex sequence with 1-based network labels.
inline std::vector<std::size_t> vertex_labels(const NetworkModel& model, const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out.push_back(k % 2 == 0 ? model.class_label(v[k]) : model.station_label(v[k]));
  return out;
}

inline nlohmann::json verdict_json(const ThroughputVerdict& v) {
  nlohmann::json j{{"optimal", v.optimal}, {"arrival_total", v.arrival_total}};
  j["max_throughput"] = v.max_throughput ? nlohmann::json(*v.max_throughput) : nlohmann::json(nullptr);
  j["witness_allocation"] = v.witness_allocation ? matrix_json(*v.witness_allocation) : nlohmann::json(nullptr);
  j["witness_path"] = v.witness_path ? nlohmann::json(*v.witness_path) : nlohmann::json(nullptr);
  j["witness_weight"] = v.witness_weight ? nlohmann::json(*v.witness_weight) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json check_json(const PerturbationCheck& c) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& p : c.grid)
    grid.push_back({{"kappa", p.kappa},
                    {"perturbed_x", p.perturbed_x},
                    {"perturbed_max", p.perturbed_max},
                    {"satisfied", p.satisfied}});
  return {{"path_index", c.path_index ? nlohmann::json(*c.path_index) : nlohmann::json(nullptr)},
          {"kappa", c.kappa},
          {"perturbed_x", c.perturbed_x},
          {"perturbed_max", c.perturbed_max},
          {"baseline", c.baseline},
          {"satisfied", c.satisfied},
          {"strict", c.strict},
          {"degenerate", c.degenerate},
          {"consistent", c.consistent},
          {"grid", grid}};
}

}  // namespace detail

/// Machine-readable analysis report. Vertex labels are 1-based: classes
/// 1..I, stations I+1..I+J.
inline nlohmann::json analysis_report_json(const NetworkModel& model, const Analysis& a) {
  using nlohmann::json;
  json out;
  out["model"] = to_json(model);
  out["tolerance"] = a.tol;
  out["kappa_grid"] = std::vector<double>(std::begin(kKappaGrid), std::end(kKappaGrid));

  if (a.solution) {
    const FluidSolution& s = *a.solution;
    json basic = json::array();
    for (const Edge& e : s.basic_edges) basic.push_back(detail::edge_json(model, e));
    out["fluid_solution"] = {{"xi_star", detail::matrix_json(s.xi_star)},
                             {"rho_star", s.rho_star},
                             {"psi_star", detail::matrix_json(s.psi_star)},
                             {"x_star", s.x_star},
                             {"basic_edges", basic}};
  } else {
    out["fluid_solution"] = nullptr;
  }

  const AssumptionReport& r = a.assumptions;
  out["assumptions"] = {{"critically_loaded", r.critically_loaded},
                        {"unique", r.unique},
                        {"mass_unique", r.mass_unique},
                        {"connected", r.connected},
                        {"is_tree", r.is_tree},
                        {"violations", r.violations}};

  json paths = json::array();
  for (const SimplePath& p : a.paths) {
    json edges = json::array();
    for (const SignedEdge& se : p.signed_edges)
      edges.push_back({{"edge", detail::edge_json(model, se.edge)}, {"sign", se.sign}});
    paths.push_back({{"leaf_pair", detail::edge_json(model, {p.class_leaf, p.station_leaf})},
                     {"kind", to_string(p.kind)},
                     {"vertices", detail::vertex_labels(model, p.ordered_vertices)},
                     {"signed_edges", edges},
                     {"m", p.m},
                     {"weight", p.weight},
                     {"sign_class", to_string(p.sign_class)},
                     {"dependence", to_string(p.dependence)}});
  }
  out["paths"] = paths;

  json cycles = json::array();
  for (const CycleDiagnostic& c : a.cycles)
    cycles.push_back({{"closing", detail::edge_json(model, c.closing)},
                      {"vertices", detail::vertex_labels(model, c.ordered_vertices)},
                      {"weight", c.weight}});
  out["cycles"] = cycles;

  out["throughput"] = {
      {"lp", a.lp_verdict ? detail::verdict_json(*a.lp_verdict) : json(nullptr)},
      {"paths", a.path_verdict ? detail::verdict_json(*a.path_verdict) : json(nullptr)}};

  json evidence = json::array();
  for (const auto& ev : a.nc.per_path_evidence)
    evidence.push_back({{"path_index", ev.path_index},
                        {"dependence", to_string(ev.dependence)},
                        {"resolved", ev.resolved()},
                        {"check", detail::check_json(ev.check)}});
  out["nc_verdict"] = {
      {"status", to_string(a.nc.status)},
      {"basis", to_string(a.nc.basis)},
      {"zero_path_evidence", evidence},
      {"combined_check", a.nc.combined_check ? detail::check_json(*a.nc.combined_check) : json(nullptr)},
      {"notes", a.nc.notes},
      {"violations", a.nc.violations}};
  out["defects"] = a.defects;
  return out;
}

/// One-line throughput verdict used by the text report.
inline std::string verdict_line(const Analysis& a) {
  std::string s;
  if (!a.lp_verdict)
    s = "no feasible static allocation";
  else if (!a.lp_verdict->optimal)
    s = "throughput sub-optimal";
  else if (a.paths.empty())
    s = "throughput optimal; no simple paths";
  else
    s = "throughput optimal";
  s += "; NC ";
  s += to_string(a.nc.status);
  s += " (";
  s += to_string(a.nc.basis);
  s += ")";
  return s;
}

inline void write_text_report(std::ostream& os, const NetworkModel& model, const Analysis& a) {
  os << "classes " << model.classes() << ", stations " << model.stations() << ", tol " << a.tol << "\n";
  if (a.solution) {
    const FluidSolution& s = *a.solution;
    os << "rho* = " << s.rho_star << "\nxi* =\n";
    for (std::size_t i = 0; i < model.classes(); ++i) {
      os << "  class " << model.class_label(i) << ":";
      for (std::size_t j = 0; j < model.stations(); ++j) os << ' ' << s.xi_star(i, j);
      os << "\n";
    }
    os << "x* =";
    for (double v : s.x_star) os << ' ' << v;
    os << "\n";
  }
  const AssumptionReport& r = a.assumptions;
  os << "critical " << r.critically_loaded << ", unique " << r.unique << ", tree " << r.is_tree << "\n";
  for (const auto& v : r.violations) os << "  violation: " << v << "\n";
  os << "simple paths: " << a.paths.size() << "\n";
  for (const SimplePath& p : a.paths) {
    os << "  (" << model.class_label(p.class_leaf) << "," << model.station_label(p.station_leaf) << ") "
       << to_string(p.kind) << ", vertices";
    for (std::size_t v : detail::vertex_labels(model, p.ordered_vertices)) os << ' ' << v;
    os << ", m =";
    for (double v : p.m) os << ' ' << v;
    os << ", weight " << p.weight << " (" << to_string(p.sign_class) << ", " << to_string(p.dependence) << ")\n";
  }
  if (a.lp_verdict && a.lp_verdict->max_throughput)
    os << "max throughput over X(x*, nu): " << *a.lp_verdict->max_throughput << " vs arrivals "
       << a.lp_verdict->arrival_total << "\n";
  for (const auto& n : a.nc.notes) os << "note: " << n << "\n";
  for (const auto& d : a.defects) os << "DEFECT: " << d << "\n";
  os << verdict_line(a) << "\n";
}

}  // namespace pqnet

#endif  // PQNET_REPORT_HPP
