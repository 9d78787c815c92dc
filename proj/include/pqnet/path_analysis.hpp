#ifndef PQNET_PATH_ANALYSIS_HPP
#define PQNET_PATH_ANALYSIS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

enum class PathKind { Open, Closed };
enum class SignClass { Negative, Zero, Positive };
enum class Dependence { ClassDependent, PoolDependent, Neither };

inline const char* to_string(PathKind k) { return k == PathKind::Open ? "open" : "closed"; }
inline const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::Negative: return "negative";
    case SignClass::Zero: return "zero";
    case SignClass::Positive: return "positive";
  }
  return "?";
}
inline const char* to_string(Dependence d) {
  switch (d) {
    case Dependence::ClassDependent: return "class-dependent";
    case Dependence::PoolDependent: return "pool-dependent";
    case Dependence::Neither: return "neither";
  }
  return "?";
}

/// s = +1 when the edge is traversed station -> class, -1 when class -> station.
struct SignedEdge {
  Edge edge;
  int sign = 0;
};

/// A simple path of the basic-activity tree, oriented from its class leaf.
///
/// `ordered_vertices` alternates class and station indices (0-based per side):
/// i_0, j_0, i_1, ..., i_k, j_k. Moving one unit of mass "along" the path,
/// i.e. changing psi_ij by -s for every signed edge, shifts the class drift
/// by m and the total service rate by -weight; negative paths therefore buy
/// throughput.
struct SimplePath {
  PathKind kind = PathKind::Open;
  std::size_t class_leaf = 0;
  std::size_t station_leaf = 0;
  std::vector<std::size_t> ordered_vertices;
  std::vector<SignedEdge> signed_edges;  // closing edge last for closed paths
  std::vector<double> m;                 // length I, zero off the path
  double weight = 0.0;                   // sum of m
  SignClass sign_class = SignClass::Zero;
  Dependence dependence = Dependence::Neither;

  [[nodiscard]] std::size_t k() const { return ordered_vertices.size() / 2 - 1; }
};

/// Signs for the edges of an alternating vertex sequence i_0, j_0, ..., j_k.
/// Traversal runs j_k -> i_k -> j_{k-1} -> ... -> i_0, so (i_l, j_l) gets +1
/// and (i_{l+1}, j_l) gets -1; a closing edge (i_0, j_k) is traversed
/// i_0 -> j_k and gets -1.
inline std::vector<SignedEdge> assign_signs(std::span<const std::size_t> vertices, bool closed) {
  std::vector<SignedEdge> out;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    if (k % 2 == 0)
      out.push_back({{vertices[k], vertices[k + 1]}, +1});
    else
      out.push_back({{vertices[k + 1], vertices[k]}, -1});
  }
  if (closed && vertices.size() >= 2) out.push_back({{vertices.front(), vertices.back()}, -1});
  return out;
}

/// m_i = sum over path edges at class i of s * mu_ij; weight = sum_i m_i.
inline std::pair<std::vector<double>, double> path_weights(const SimplePath& path,
                                                           const NetworkModel& model) {
  std::vector<double> m(model.classes(), 0.0);
  for (const SignedEdge& se : path.signed_edges)
    m[se.edge.cls] += se.sign * model.mu(se.edge.cls, se.edge.station);
  double weight = 0.0;
  for (double v : m) weight += v;
  return {std::move(m), weight};
}

inline SignClass classify_sign(double weight, double tol = kDefaultTol) {
  if (std::abs(weight) <= tol) return SignClass::Zero;
  return weight < 0.0 ? SignClass::Negative : SignClass::Positive;
}

/// Class-dependent: signed rates cancel at every class on the path.
/// Pool-dependent: they cancel at every station. Class-dependence wins when
/// both hold.
inline Dependence classify_dependence(const SimplePath& path, const NetworkModel& model,
                                      double tol = kDefaultTol) {
  std::vector<double> per_class(model.classes(), 0.0), per_station(model.stations(), 0.0);
  std::vector<bool> on_class(model.classes(), false), on_station(model.stations(), false);
  for (const SignedEdge& se : path.signed_edges) {
    const double v = se.sign * model.mu(se.edge.cls, se.edge.station);
    per_class[se.edge.cls] += v;
    per_station[se.edge.station] += v;
    on_class[se.edge.cls] = on_station[se.edge.station] = true;
  }
  bool class_dep = true, pool_dep = true;
  for (std::size_t i = 0; i < model.classes(); ++i)
    if (on_class[i] && std::abs(per_class[i]) > tol) class_dep = false;
  for (std::size_t j = 0; j < model.stations(); ++j)
    if (on_station[j] && std::abs(per_station[j]) > tol) pool_dep = false;
  if (class_dep) return Dependence::ClassDependent;
  if (pool_dep) return Dependence::PoolDependent;
  return Dependence::Neither;
}

/// Builds the full SimplePath for leaf pair (i, j) from the tree path.
inline SimplePath make_simple_path(const NetworkModel& model, const FluidSolution& sol,
                                   const ActivitySet& acts, std::size_t i, std::size_t j,
                                   double tol = kDefaultTol) {
  SimplePath p;
  p.class_leaf = i;
  p.station_leaf = j;
  p.kind = acts.contains({i, j}) ? PathKind::Closed : PathKind::Open;
  p.ordered_vertices = detail::tree_path(sol.basic_edges, model.classes(), model.stations(), i, j);
  if (p.ordered_vertices.size() < 4)
    throw NotATree("leaf pair has no basic path of three or more edges");
  p.signed_edges = assign_signs(p.ordered_vertices, p.kind == PathKind::Closed);
  std::tie(p.m, p.weight) = path_weights(p, model);
  p.sign_class = classify_sign(p.weight, tol);
  p.dependence = classify_dependence(p, model, tol);
  return p;
}

/// One simple path per class/station pair that is not a basic activity, in
/// (class, station) order. Requires the basic graph to be a spanning tree.
inline std::vector<SimplePath> enumerate_simple_paths(const NetworkModel& model,
                                                      const FluidSolution& sol,
                                                      const ActivitySet& acts,
                                                      double tol = kDefaultTol) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  if (sol.basic_edges.size() + 1 != I + J) throw NotATree("basic graph does not have I+J-1 edges");
  detail::DisjointSets ds(I + J);
  for (const Edge& e : sol.basic_edges)
    if (!ds.unite(e.cls, I + e.station)) throw NotATree("basic graph contains a cycle");

  std::vector<SimplePath> paths;
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      if (!sol.is_basic({i, j})) paths.push_back(make_simple_path(model, sol, acts, i, j, tol));
  return paths;
}

inline std::vector<SimplePath> enumerate_simple_paths(const NetworkModel& model,
                                                      const FluidSolution& sol,
                                                      double tol = kDefaultTol) {
  return enumerate_simple_paths(model, sol, activity_set(model), tol);
}

/// Cycle formed by one basic edge outside a spanning forest of the basic graph.
struct CycleDiagnostic {
  Edge closing;
  std::vector<std::size_t> ordered_vertices;
  double weight = 0.0;
};

/// For basic graphs with cycles: the signed weight of every fundamental
/// cycle, using the closed-path sign rule with the forest-closing edge as the
/// closing edge. A throughput optimal model has all of these equal to zero.
inline std::vector<CycleDiagnostic> fundamental_cycle_weights(const NetworkModel& model,
                                                              const FluidSolution& sol) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  detail::DisjointSets ds(I + J);
  std::vector<Edge> forest, extra;
  for (const Edge& e : sol.basic_edges) (ds.unite(e.cls, I + e.station) ? forest : extra).push_back(e);
  std::vector<CycleDiagnostic> out;
  for (const Edge& e : extra) {
    CycleDiagnostic c;
    c.closing = e;
    c.ordered_vertices = detail::tree_path(forest, I, J, e.cls, e.station);
    for (const SignedEdge& se : assign_signs(c.ordered_vertices, true))
      c.weight += se.sign * model.mu(se.edge.cls, se.edge.station);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace pqnet

#endif  // PQNET_PATH_ANALYSIS_HPP
