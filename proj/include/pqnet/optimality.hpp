#ifndef PQNET_OPTIMALITY_HPP
#define PQNET_OPTIMALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/linprog.hpp"
#include "pqnet/path_analysis.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

/// X(x_bar, nu_bar): nonnegative psi with row sums <= x_bar and column sums <= nu_bar.
struct AllocationPolytope {
  std::vector<double> x_bar;
  std::vector<double> nu_bar;

  [[nodiscard]] bool contains(const RealMatrix& psi, double tol = kDefaultTol) const {
    if (psi.rows() != x_bar.size() || psi.cols() != nu_bar.size()) return false;
    for (double v : psi.flat())
      if (v < -tol) return false;
    for (std::size_t i = 0; i < psi.rows(); ++i)
      if (psi.row_sum(i) > x_bar[i] + tol) return false;
    for (std::size_t j = 0; j < psi.cols(); ++j)
      if (psi.col_sum(j) > nu_bar[j] + tol) return false;
    return true;
  }
};

/// sum_ij mu_ij psi_ij
inline double throughput(const NetworkModel& model, const RealMatrix& psi) {
  double s = 0.0;
  for (std::size_t i = 0; i < model.classes(); ++i)
    for (std::size_t j = 0; j < model.stations(); ++j) s += model.mu(i, j) * psi(i, j);
  return s;
}

struct ThroughputMax {
  double value = 0.0;
  RealMatrix psi;
};

/// Maximal total service rate over X(x_bar, nu_bar).
inline ThroughputMax max_throughput(std::span<const double> x_bar, std::span<const double> nu_bar,
                                    const NetworkModel& model) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  if (x_bar.size() != I || nu_bar.size() != J)
    throw DimensionMismatch("max_throughput: x_bar/nu_bar sizes do not match the model");
  const auto vars = activity_set(model).edges;
  LinearProgram lp(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) lp.objective[k] = -model.mu(vars[k].cls, vars[k].station);
  for (std::size_t i = 0; i < I; ++i) {
    std::vector<double> row(vars.size(), 0.0);
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (vars[k].cls == i) row[k] = 1.0;
    lp.add_ub(std::move(row), std::max(x_bar[i], 0.0));
  }
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> col(vars.size(), 0.0);
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (vars[k].station == j) col[k] = 1.0;
    lp.add_ub(std::move(col), std::max(nu_bar[j], 0.0));
  }
  const LPResult res = solve_lp(lp);
  if (res.status != LPStatus::Optimal)
    throw NumericalFailure("throughput LP did not reach optimality");  // psi = 0 is always feasible
  ThroughputMax out{-res.value, RealMatrix(I, J)};
  if (out.value == 0.0) out.value = 0.0;  // drop -0
  for (std::size_t k = 0; k < vars.size(); ++k) out.psi(vars[k].cls, vars[k].station) = res.x[k];
  return out;
}

struct ThroughputVerdict {
  bool optimal = true;
  std::optional<double> max_throughput;  // LP route only
  double arrival_total = 0.0;
  std::optional<RealMatrix> witness_allocation;  // LP route, sub-optimal only
  std::optional<std::size_t> witness_path;       // path route: most negative path
  std::optional<double> witness_weight;
};

/// Throughput optimal iff no allocation in X(x*, nu) serves faster than the
/// total arrival rate.
inline ThroughputVerdict throughput_verdict_lp(const NetworkModel& model, const FluidSolution& sol,
                                               double tol = kDefaultTol) {
  ThroughputVerdict v;
  v.arrival_total = model.total_arrival_rate();
  const auto best = max_throughput(sol.x_star, model.nu(), model);
  v.max_throughput = best.value;
  v.optimal = best.value <= v.arrival_total + tol;
  if (!v.optimal) v.witness_allocation = best.psi;
  return v;
}

/// Sub-optimal iff some simple path has negative weight.
inline ThroughputVerdict throughput_verdict_paths(std::span<const SimplePath> paths,
                                                  double tol = kDefaultTol) {
  ThroughputVerdict v;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    if (paths[k].weight < -tol && (!v.witness_weight || paths[k].weight < *v.witness_weight)) {
      v.witness_path = k;
      v.witness_weight = paths[k].weight;
    }
  }
  v.optimal = !v.witness_path.has_value();
  return v;
}

/// Accepts psi as a sub-optimality certificate: psi lies in X(x*, nu) and its
/// throughput beats the total arrival rate.
inline bool is_suboptimality_witness(const NetworkModel& model, const FluidSolution& sol,
                                     const RealMatrix& psi, double tol = kDefaultTol) {
  const AllocationPolytope poly{sol.x_star, {model.nu().begin(), model.nu().end()}};
  return poly.contains(psi, tol) && throughput(model, psi) > model.total_arrival_rate() + tol;
}

/// One evaluation of the perturbed throughput problem.
struct KappaProbe {
  double kappa = 0.0;
  std::vector<double> perturbed_x;
  double perturbed_max = 0.0;
  bool satisfied = false;
};

/// Shifts x* along a zero path (x = x* + m_p kappa) and compares the best
/// achievable throughput with the baseline sum mu psi*.
struct PerturbationCheck {
  std::optional<std::size_t> path_index;  // empty for the combined check
  double kappa = 0.0;                     // largest grid step
  std::vector<double> perturbed_x;        // at the largest step
  double perturbed_max = 0.0;             // at the largest step
  double baseline = 0.0;
  bool satisfied = false;   // perturbed_max <= baseline + tol at every step
  bool strict = false;      // perturbed_max < baseline - tol at the largest step
  bool degenerate = false;  // m_p = 0, the shift is the identity
  bool consistent = true;   // all steps agree on `satisfied`
  std::vector<KappaProbe> grid;
};

/// Relative step sizes of the kappa grid.
inline constexpr double kKappaGrid[] = {1.0, 0.5, 0.25};

namespace detail {

inline double min_basic_mass(const FluidSolution& sol) {
  double m = std::numeric_limits<double>::infinity();
  for (const Edge& e : sol.basic_edges) m = std::min(m, sol.psi_star(e.cls, e.station));
  return std::isfinite(m) ? m : 0.0;
}

inline PerturbationCheck run_perturbation(const NetworkModel& model, const FluidSolution& sol,
                                          const std::vector<double>& direction, double kappa,
                                          double tol) {
  PerturbationCheck c;
  c.kappa = kappa;
  c.baseline = throughput(model, sol.psi_star);
  c.satisfied = true;
  for (double rel : kKappaGrid) {
    KappaProbe probe;
    probe.kappa = kappa * rel;
    probe.perturbed_x = sol.x_star;
    for (std::size_t i = 0; i < probe.perturbed_x.size(); ++i)
      probe.perturbed_x[i] += direction[i] * probe.kappa;
    probe.perturbed_max = max_throughput(probe.perturbed_x, model.nu(), model).value;
    probe.satisfied = probe.perturbed_max <= c.baseline + tol;
    c.satisfied = c.satisfied && probe.satisfied;
    c.grid.push_back(std::move(probe));
  }
  for (const auto& p : c.grid) c.consistent = c.consistent && (p.satisfied == c.grid.front().satisfied);
  c.perturbed_x = c.grid.front().perturbed_x;
  c.perturbed_max = c.grid.front().perturbed_max;
  c.strict = c.perturbed_max < c.baseline - tol;
  return c;
}

}  // namespace detail

/// Step size for a zero path: 1e-3 * (smallest basic mass) / max(1, |m_p|_inf),
/// which keeps x* + m_p kappa well inside the positive orthant.
inline double zero_path_kappa(const FluidSolution& sol, const SimplePath& path) {
  double norm = 0.0;
  for (double v : path.m) norm = std::max(norm, std::abs(v));
  return 1e-3 * detail::min_basic_mass(sol) / std::max(1.0, norm);
}

inline PerturbationCheck zero_path_check(const NetworkModel& model, const FluidSolution& sol,
                                         const SimplePath& path, std::size_t path_index,
                                         double tol = kDefaultTol) {
  if (path.sign_class != SignClass::Zero) throw Error("zero_path_check needs a zero-weight path");
  bool degenerate = true;
  for (double v : path.m) degenerate = degenerate && std::abs(v) <= tol;
  if (degenerate) {
    PerturbationCheck c;
    c.path_index = path_index;
    c.baseline = throughput(model, sol.psi_star);
    c.perturbed_x = sol.x_star;
    c.perturbed_max = c.baseline;
    c.degenerate = true;
    c.satisfied = true;
    return c;
  }
  auto c = detail::run_perturbation(model, sol, path.m, zero_path_kappa(sol, path), tol);
  c.path_index = path_index;
  return c;
}

/// All zero paths at once, with weights M_p = kappa / |P0| (kappa the
/// smallest per-path step).
inline std::optional<PerturbationCheck> combined_zero_path_check(const NetworkModel& model,
                                                                 const FluidSolution& sol,
                                                                 std::span<const SimplePath> paths,
                                                                 double tol = kDefaultTol) {
  std::vector<const SimplePath*> zero;
  for (const auto& p : paths)
    if (p.sign_class == SignClass::Zero) zero.push_back(&p);
  if (zero.empty()) return std::nullopt;
  double kappa = std::numeric_limits<double>::infinity();
  for (const auto* p : zero) kappa = std::min(kappa, zero_path_kappa(sol, *p));
  std::vector<double> direction(model.classes(), 0.0);
  for (const auto* p : zero)
    for (std::size_t i = 0; i < direction.size(); ++i) direction[i] += p->m[i] / double(zero.size());
  return detail::run_perturbation(model, sol, direction, kappa, tol);
}

/// The one-parameter family of throughput-maximizing allocations for a
/// four-vertex zero path after the mass shift Delta = m_{i_1} M: gamma moves
/// mass onto the leaf pair (i_0, j_1) while keeping every row and column sum.
inline RealMatrix gamma_family_allocation(const FluidSolution& sol, const SimplePath& path, double M,
                                          double gamma) {
  if (path.ordered_vertices.size() != 4) throw Error("gamma family needs a four-vertex path");
  const std::size_t i0 = path.ordered_vertices[0], j0 = path.ordered_vertices[1];
  const std::size_t i1 = path.ordered_vertices[2], j1 = path.ordered_vertices[3];
  const double delta = path.m[i1] * M;
  RealMatrix psi = sol.psi_star;
  psi(i1, j1) = sol.psi_star(i1, j1) - gamma;
  psi(i1, j0) = sol.psi_star(i1, j0) + delta + gamma;
  psi(i0, j1) = gamma;
  psi(i0, j0) = sol.psi_star(i0, j0) - delta - gamma;
  return psi;
}

/// Admissible gamma interval [0, hi] for gamma_family_allocation.
inline double gamma_family_upper(const FluidSolution& sol, const SimplePath& path, double M) {
  const std::size_t i0 = path.ordered_vertices[0], j0 = path.ordered_vertices[1];
  const std::size_t i1 = path.ordered_vertices[2], j1 = path.ordered_vertices[3];
  return std::min(sol.psi_star(i1, j1), sol.psi_star(i0, j0) - path.m[i1] * M);
}

}  // namespace pqnet

#endif  // PQNET_OPTIMALITY_HPP
