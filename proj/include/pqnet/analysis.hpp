#ifndef PQNET_ANALYSIS_HPP
#define PQNET_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/optimality.hpp"
#include "pqnet/path_analysis.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

enum class NCStatus { NCPossible, NCImpossible, Unknown };

/// Which result the null-controllability verdict rests on.
enum class NCBasis {
  ThroughputSubOptimal,  // sub-optimality implies NC (prior work, not proven here)
  NoZeroPaths,           // optimal, P0 empty
  ZeroPathsResolved,     // optimal, every zero path is class-/pool-dependent or strict
  TwoClassesOrTwoPools,  // optimal with I = 2 or J = 2
  UnresolvedZeroPath,    // optimal, general I and J, some zero path passes neither test
  AssumptionsFailed,
};

inline const char* to_string(NCStatus s) {
  switch (s) {
    case NCStatus::NCPossible: return "possible";
    case NCStatus::NCImpossible: return "impossible";
    case NCStatus::Unknown: return "unknown";
  }
  return "?";
}

inline const char* to_string(NCBasis b) {
  switch (b) {
    case NCBasis::ThroughputSubOptimal:
      return "throughput sub-optimal, which implies null controllability";
    case NCBasis::NoZeroPaths: return "throughput optimal with no zero paths";
    case NCBasis::ZeroPathsResolved:
      return "throughput optimal; every zero path is class-dependent, pool-dependent, or strictly "
             "throughput-decreasing";
    case NCBasis::TwoClassesOrTwoPools: return "throughput optimal with two classes or two pools";
    case NCBasis::UnresolvedZeroPath:
      return "throughput optimal but a zero path is neither class- nor pool-dependent and not "
             "strictly decreasing (open case)";
    case NCBasis::AssumptionsFailed: return "static fluid assumptions failed";
  }
  return "?";
}

/// Evidence gathered for one zero path.
struct ZeroPathEvidence {
  std::size_t path_index = 0;
  Dependence dependence = Dependence::Neither;
  PerturbationCheck check;

  [[nodiscard]] bool resolved() const { return dependence != Dependence::Neither || check.strict; }
};

struct NCVerdict {
  NCStatus status = NCStatus::Unknown;
  NCBasis basis = NCBasis::AssumptionsFailed;
  std::vector<ZeroPathEvidence> per_path_evidence;
  std::optional<PerturbationCheck> combined_check;
  std::vector<std::string> notes;
  std::vector<std::string> violations;
};

/// Everything the pipeline computes for one model.
struct Analysis {
  double tol = kDefaultTol;
  std::optional<FluidSolution> solution;  // empty if the allocation LP is infeasible
  AssumptionReport assumptions;
  std::vector<SimplePath> paths;
  std::vector<CycleDiagnostic> cycles;  // only when the basic graph has cycles
  std::optional<ThroughputVerdict> lp_verdict;
  std::optional<ThroughputVerdict> path_verdict;
  NCVerdict nc;
  std::vector<std::string> defects;  // internal inconsistencies worth reporting

  [[nodiscard]] bool throughput_optimal() const { return lp_verdict && lp_verdict->optimal; }
  [[nodiscard]] std::vector<std::size_t> zero_paths() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < paths.size(); ++k)
      if (paths[k].sign_class == SignClass::Zero) out.push_back(k);
    return out;
  }
};

namespace detail {

inline void decide_nc(const NetworkModel& model, Analysis& a) {
  NCVerdict& nc = a.nc;
  const std::size_t I = model.classes(), J = model.stations();
  const bool two_system = I == 2 || J == 2;

  if (!a.solution || !a.assumptions.structural_ok()) {
    nc.status = NCStatus::Unknown;
    nc.basis = NCBasis::AssumptionsFailed;
    nc.violations = a.assumptions.violations;
    if (!a.solution) nc.violations.push_back("static allocation problem is infeasible");
    return;
  }
  if (!a.assumptions.unique) {
    if (a.assumptions.mass_unique) {
      nc.notes.push_back(
          "allocation is not unique but every optimum has the same mass vector x*, so all optima "
          "share one throughput status; using the solver's vertex");
    } else if (two_system) {
      nc.notes.push_back(
          "optima differ in x*; with two classes or two pools they share one throughput status; "
          "using the solver's vertex");
    } else {
      nc.status = NCStatus::Unknown;
      nc.basis = NCBasis::AssumptionsFailed;
      nc.violations = a.assumptions.violations;
      return;
    }
  }

  const FluidSolution& sol = *a.solution;
  for (std::size_t k : a.zero_paths()) {
    ZeroPathEvidence ev;
    ev.path_index = k;
    ev.dependence = a.paths[k].dependence;
    ev.check = zero_path_check(model, sol, a.paths[k], k, a.tol);
    nc.per_path_evidence.push_back(std::move(ev));
  }
  nc.combined_check = combined_zero_path_check(model, sol, a.paths, a.tol);

  if (!a.lp_verdict->optimal) {
    nc.status = NCStatus::NCPossible;
    nc.basis = NCBasis::ThroughputSubOptimal;
    return;
  }
  nc.status = NCStatus::NCImpossible;
  if (nc.per_path_evidence.empty()) {
    nc.basis = NCBasis::NoZeroPaths;
    return;
  }
  bool all_resolved = true;
  for (const auto& ev : nc.per_path_evidence) all_resolved = all_resolved && ev.resolved();
  if (all_resolved) {
    nc.basis = NCBasis::ZeroPathsResolved;
  } else if (two_system) {
    nc.basis = NCBasis::TwoClassesOrTwoPools;
  } else {
    nc.status = NCStatus::Unknown;
    nc.basis = NCBasis::UnresolvedZeroPath;
  }
}

}  // namespace detail

/// Full pipeline: solve, check assumptions, enumerate paths, decide
/// throughput optimality two ways, run zero-path checks, decide NC status.
inline Analysis analyze(const NetworkModel& model, double tol = kDefaultTol) {
  Analysis a;
  a.tol = tol;
  try {
    a.solution = solve_static_allocation(model, tol);
  } catch (const InfeasibleModel& e) {
    a.assumptions.violations.push_back(e.what());
    detail::decide_nc(model, a);
    return a;
  }
  const FluidSolution& sol = *a.solution;
  a.assumptions = check_assumptions(model, sol, tol);
  a.lp_verdict = throughput_verdict_lp(model, sol, tol);
  if (a.assumptions.is_tree) {
    a.paths = enumerate_simple_paths(model, sol, tol);
    a.path_verdict = throughput_verdict_paths(a.paths, tol);
    if (a.assumptions.all_ok() && a.path_verdict->optimal != a.lp_verdict->optimal)
      a.defects.push_back("LP and path-based throughput verdicts disagree");
  } else {
    a.cycles = fundamental_cycle_weights(model, sol);
  }
  detail::decide_nc(model, a);
  return a;
}

inline NCVerdict nc_verdict(const NetworkModel& model, double tol = kDefaultTol) {
  return analyze(model, tol).nc;
}

}  // namespace pqnet

#endif  // PQNET_ANALYSIS_HPP
