#ifndef PQNET_STATIC_FLUID_HPP
#define PQNET_STATIC_FLUID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/linprog.hpp"
#include "pqnet/matrix.hpp"

namespace pqnet {

/// Optimal static allocation and the quantities derived from it.
struct FluidSolution {
  RealMatrix xi_star;           // fraction of station j's capacity given to class i
  double rho_star = 0.0;        // maximal station load
  RealMatrix psi_star;          // fluid mass, xi*_ij * nu_j
  std::vector<double> x_star;   // per-class mass, row sums of psi*
  std::vector<Edge> basic_edges;  // xi*_ij > tol, lexicographic order

  [[nodiscard]] bool is_basic(Edge e) const {
    return std::binary_search(basic_edges.begin(), basic_edges.end(), e);
  }
};

/// Outcome of checking critical load, uniqueness and the tree property.
struct AssumptionReport {
  bool critically_loaded = false;
  bool unique = false;       // xi* is the only optimum
  bool mass_unique = false;  // x* is the same at every optimum
  bool connected = false;
  bool is_tree = false;
  std::vector<std::string> violations;

  /// Paths and verdicts are defined once the load is critical and the basic
  /// graph is a spanning tree.
  [[nodiscard]] bool structural_ok() const { return critically_loaded && is_tree; }
  [[nodiscard]] bool all_ok() const { return structural_ok() && unique; }
};

/// Builds a FluidSolution from an allocation matrix (used for solver output
/// and for planted allocations alike).
inline FluidSolution make_fluid_solution(const NetworkModel& model, RealMatrix xi, double rho,
                                         double tol = kDefaultTol) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  FluidSolution sol;
  sol.rho_star = rho;
  sol.psi_star = RealMatrix(I, J);
  sol.x_star.assign(I, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      sol.psi_star(i, j) = xi(i, j) * model.nu()[j];
      sol.x_star[i] += sol.psi_star(i, j);
      if (xi(i, j) > tol) sol.basic_edges.push_back({i, j});
    }
  }
  sol.xi_star = std::move(xi);
  return sol;
}

namespace detail {

/// The allocation LP: variables xi_ij over activities, then rho.
struct AllocationLP {
  LinearProgram lp;
  std::vector<Edge> vars;  // activity for each xi variable
  std::size_t rho_index = 0;
};

inline AllocationLP build_allocation_lp(const NetworkModel& model) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  const EffectiveRates rates = effective_rates(model);
  AllocationLP a;
  a.vars = activity_set(model).edges;
  const std::size_t n = a.vars.size() + 1;
  a.rho_index = a.vars.size();
  a.lp = LinearProgram(n);
  a.lp.objective[a.rho_index] = 1.0;
  for (std::size_t i = 0; i < I; ++i) {
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k < a.vars.size(); ++k)
      if (a.vars[k].cls == i) row[k] = rates.mubar(i, a.vars[k].station);
    a.lp.add_eq(std::move(row), model.lambda()[i]);
  }
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> load(n, 0.0);
    for (std::size_t k = 0; k < a.vars.size(); ++k)
      if (a.vars[k].station == j) load[k] = 1.0;
    std::vector<double> by_rho = load;
    by_rho[a.rho_index] = -1.0;
    a.lp.add_ub(std::move(by_rho), 0.0);  // column sum <= rho
    a.lp.add_ub(std::move(load), 1.0);    // column sum <= 1 (xi in the allocation set)
  }
  return a;
}

/// Min and max of coeffs . x over {x feasible : objective . x = opt_value}.
inline std::pair<double, double> face_range(const LinearProgram& lp, const std::vector<double>& coeffs,
                                            double opt_value) {
  LinearProgram face = lp;
  face.add_eq(lp.objective, opt_value);
  face.objective = coeffs;
  const LPResult lo = solve_lp(face);
  for (double& c : face.objective) c = -c;
  const LPResult hi = solve_lp(face);
  if (lo.status != LPStatus::Optimal || hi.status != LPStatus::Optimal)
    throw NumericalFailure("optimal face probe did not solve to optimality");
  return {lo.value, -hi.value};
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace detail

/// Solves min rho s.t. sum_j mubar_ij xi_ij = lambda_i, sum_i xi_ij <= rho,
/// xi in the allocation set. Throws InfeasibleModel when no allocation serves
/// every class within the station capacities.
inline FluidSolution solve_static_allocation(const NetworkModel& model, double tol = kDefaultTol) {
  const auto a = detail::build_allocation_lp(model);
  const LPResult res = solve_lp(a.lp);
  if (res.status != LPStatus::Optimal)
    throw InfeasibleModel("static allocation problem is " + std::string(to_string(res.status)) +
                          ": no allocation serves all arrival rates");
  RealMatrix xi(model.classes(), model.stations());
  for (std::size_t k = 0; k < a.vars.size(); ++k) xi(a.vars[k].cls, a.vars[k].station) = res.x[k];
  return make_fluid_solution(model, std::move(xi), res.x[a.rho_index], tol);
}

inline AssumptionReport check_assumptions(const NetworkModel& model, const FluidSolution& sol,
                                          double tol = kDefaultTol) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  AssumptionReport rep;

  rep.critically_loaded = std::abs(sol.rho_star - 1.0) <= tol;
  if (!rep.critically_loaded) {
    std::ostringstream os;
    os << "not critically loaded: rho* = " << sol.rho_star;
    rep.violations.push_back(os.str());
  }
  for (std::size_t j = 0; j < J; ++j) {
    const double s = sol.xi_star.col_sum(j);
    if (std::abs(s - 1.0) > tol) {
      rep.critically_loaded = false;
      std::ostringstream os;
      os << "station " << model.station_label(j) << " is not fully allocated (sum = " << s << ")";
      rep.violations.push_back(os.str());
    }
  }

  // Uniqueness: every xi_ij must be pinned on the optimal face.
  const auto a = detail::build_allocation_lp(model);
  rep.unique = true;
  for (std::size_t k = 0; k < a.vars.size(); ++k) {
    const auto [lo, hi] = optimal_range(a.lp, k, sol.rho_star);
    if (hi - lo > 2 * tol) {
      rep.unique = false;
      std::ostringstream os;
      os << "allocation is not unique: xi(" << model.class_label(a.vars[k].cls) << ","
         << model.station_label(a.vars[k].station) << ") ranges over [" << lo << ", " << hi << "]";
      rep.violations.push_back(os.str());
    }
  }
  rep.mass_unique = rep.unique;
  if (!rep.unique) {
    rep.mass_unique = true;
    for (std::size_t i = 0; i < I; ++i) {
      std::vector<double> mass(a.lp.n_vars, 0.0);
      for (std::size_t k = 0; k < a.vars.size(); ++k)
        if (a.vars[k].cls == i) mass[k] = model.nu()[a.vars[k].station];
      const auto [lo, hi] = detail::face_range(a.lp, mass, sol.rho_star);
      if (hi - lo > 2 * tol) {
        rep.mass_unique = false;
        std::ostringstream os;
        os << "mass vector is not unique: x_" << model.class_label(i) << " ranges over [" << lo << ", "
           << hi << "]";
        rep.violations.push_back(os.str());
      }
    }
  }

  // Tree: I+J-1 basic edges spanning all vertices.
  detail::DisjointSets ds(I + J);
  bool acyclic = true;
  for (const Edge& e : sol.basic_edges)
    if (!ds.unite(e.cls, I + e.station)) acyclic = false;
  std::size_t components = 0;
  for (std::size_t v = 0; v < I + J; ++v)
    if (ds.find(v) == v) ++components;
  rep.connected = components == 1;
  rep.is_tree = rep.connected && sol.basic_edges.size() == I + J - 1;
  if (!rep.connected) {
    rep.violations.push_back("basic activity graph is disconnected (" + std::to_string(components) +
                             " components)");
  }
  if (!acyclic) rep.violations.push_back("basic activity graph contains a cycle");
  return rep;
}

/// Knobs for the random instance generator.
struct GeneratorOptions {
  double extra_activity_prob = 0.5;  // chance that a non-tree pair is an activity
  bool integer_rates = false;        // draw mu from {1..10} instead of [0.5, 10]
  bool plant_zero_path = false;      // force one simple path to have weight exactly 0
  int max_retries = 100;
};

struct GeneratedInstance {
  NetworkModel model;
  FluidSolution planted;  // the allocation the instance was built around
  std::uint64_t seed_used = 0;
};

namespace detail {

/// Uniform spanning tree of the complete bipartite graph K_{I,J} by Wilson's
/// loop-erased random walk. Vertices 0..I-1 are classes, I..I+J-1 stations.
inline std::vector<Edge> random_bipartite_tree(std::size_t I, std::size_t J, std::mt19937_64& rng) {
  const std::size_t V = I + J;
  std::vector<bool> in_tree(V, false);
  std::vector<std::size_t> next(V, 0);
  std::uniform_int_distribution<std::size_t> pick_class(0, I - 1), pick_station(0, J - 1);
  std::uniform_int_distribution<std::size_t> pick_vertex(0, V - 1);
  auto neighbour = [&](std::size_t v) { return v < I ? I + pick_station(rng) : pick_class(rng); };

  in_tree[pick_vertex(rng)] = true;
  std::vector<Edge> edges;
  for (std::size_t start = 0; start < V; ++start) {
    for (std::size_t v = start; !in_tree[v]; v = next[v]) next[v] = neighbour(v);
    for (std::size_t v = start; !in_tree[v]; v = next[v]) {
      in_tree[v] = true;
      const std::size_t w = next[v];
      edges.push_back(v < I ? Edge{v, w - I} : Edge{w, v - I});
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Unique path in a tree from class `i` to station `j` as alternating
/// vertices (class, station, class, ..., station), 0-based per side.
inline std::vector<std::size_t> tree_path(const std::vector<Edge>& tree, std::size_t I, std::size_t J,
                                          std::size_t i, std::size_t j) {
  const std::size_t V = I + J;
  std::vector<std::vector<std::size_t>> adj(V);
  for (const Edge& e : tree) {
    adj[e.cls].push_back(I + e.station);
    adj[I + e.station].push_back(e.cls);
  }
  std::vector<std::size_t> parent(V, V);
  std::vector<std::size_t> queue{i};
  parent[i] = i;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (std::size_t w : adj[queue[h]])
      if (parent[w] == V) {
        parent[w] = queue[h];
        queue.push_back(w);
      }
  if (parent[I + j] == V) return {};
  std::vector<std::size_t> rev;
  for (std::size_t v = I + j; v != i; v = parent[v]) rev.push_back(v);
  rev.push_back(i);
  std::vector<std::size_t> out(rev.rbegin(), rev.rend());
  for (std::size_t k = 1; k < out.size(); k += 2) out[k] -= I;
  return out;
}

inline bool allocations_match(const RealMatrix& a, const RealMatrix& b, double tol) {
  for (std::size_t k = 0; k < a.flat().size(); ++k)
    if (std::abs(a.flat()[k] - b.flat()[k]) > tol) return false;
  return true;
}

}  // namespace detail

/// Builds a random model around a planted allocation whose basic graph is a
/// uniform random spanning tree, then keeps it only if re-solving recovers the
/// plant as the unique, critically loaded optimum. Failed draws move on to
/// seed+1, up to `max_retries` times.
inline GeneratedInstance generate_critical_instance(std::uint64_t seed, std::size_t I, std::size_t J,
                                                    const GeneratorOptions& opt = {}) {
  if (I == 0 || J == 0) throw DimensionMismatch("generator needs I, J >= 1");
  for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> rate(0.5, 10.0), cap(0.5, 2.0), coin(0.0, 1.0);
    std::uniform_int_distribution<int> int_rate(1, 10);
    std::exponential_distribution<double> weight(1.0);
    auto draw_rate = [&] { return opt.integer_rates ? double(int_rate(rng)) : rate(rng); };

    const auto tree = detail::random_bipartite_tree(I, J, rng);
    RealMatrix xi(I, J);
    for (std::size_t j = 0; j < J; ++j) {
      double total = 0.0;
      for (const Edge& e : tree)
        if (e.station == j) total += (xi(e.cls, j) = weight(rng) + 1e-3);
      for (std::size_t i = 0; i < I; ++i) xi(i, j) /= total;
    }
    RawModel raw{I, J, std::vector<double>(I, 0.0), std::vector<double>(J),
                 std::vector<std::vector<double>>(I, std::vector<double>(J, 0.0))};
    for (const Edge& e : tree) raw.mu[e.cls][e.station] = draw_rate();
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        if (!std::binary_search(tree.begin(), tree.end(), Edge{i, j}) &&
            coin(rng) < opt.extra_activity_prob)
          raw.mu[i][j] = draw_rate();
    for (double& v : raw.nu) v = cap(rng);

    if (opt.plant_zero_path) {
      std::vector<Edge> leaf_pairs;
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
          if (!std::binary_search(tree.begin(), tree.end(), Edge{i, j})) leaf_pairs.push_back({i, j});
      if (leaf_pairs.empty()) throw GenerationFailed("no simple paths exist for I=" + std::to_string(I) +
                                                     ", J=" + std::to_string(J));
      std::uniform_int_distribution<std::size_t> pick(0, leaf_pairs.size() - 1);
      const Edge leaf = leaf_pairs[pick(rng)];
      const auto path = detail::tree_path(tree, I, J, leaf.cls, leaf.station);
      // Signed sum of all terms except the (i_1, j_0) edge, which carries -1.
      double others = -raw.mu[leaf.cls][leaf.station];
      for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const Edge e = (k % 2 == 0) ? Edge{path[k], path[k + 1]} : Edge{path[k + 1], path[k]};
        if (k == 1) continue;
        others += (k % 2 == 0 ? 1.0 : -1.0) * raw.mu[e.cls][e.station];
      }
      if (others < 0.5) continue;
      raw.mu[path[2]][path[1]] = others;
    }

    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j) raw.lambda[i] += raw.mu[i][j] * raw.nu[j] * xi(i, j);

    NetworkModel model = validate_model(raw);
    FluidSolution planted = make_fluid_solution(model, xi, 1.0);
    FluidSolution solved;
    try {
      solved = solve_static_allocation(model);
    } catch (const InfeasibleModel&) {
      continue;
    }
    if (!detail::allocations_match(solved.xi_star, planted.xi_star, 1e-6)) continue;
    const AssumptionReport rep = check_assumptions(model, solved);
    if (!rep.all_ok()) continue;
    return {std::move(model), std::move(planted), s};
  }
  throw GenerationFailed("no admissible instance for seed " + std::to_string(seed) + " after " +
                         std::to_string(opt.max_retries) + " draws");
}

}  // namespace pqnet

#endif  // PQNET_STATIC_FLUID_HPP
