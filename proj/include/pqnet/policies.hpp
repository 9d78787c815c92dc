#ifndef PQNET_POLICIES_HPP
#define PQNET_POLICIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/optimality.hpp"
#include "pqnet/path_analysis.hpp"
#include "pqnet/simulator.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

/// Work-conserving on the basic activities. Each basic activity is first
/// filled up to its fluid share round(n psi*_ij); leftover customers and
/// servers are then matched over basic activities in decreasing mu order.
class GreedyBasic : public Policy {
 public:
  GreedyBasic(const NetworkModel& model, const FluidSolution& sol) : order_(sol.basic_edges) {
    std::stable_sort(order_.begin(), order_.end(), [&](const Edge& a, const Edge& b) {
      return model.mu(a.cls, a.station) > model.mu(b.cls, b.station);
    });
  }

  [[nodiscard]] std::string name() const override { return "greedy-basic"; }

  void assign(const SystemState& state, const SystemInstance& sys, CountMatrix& psi) const override {
    psi = CountMatrix(sys.classes(), sys.stations());
    std::vector<long long> row_left = state.X, col_left = sys.N;
    for (const Edge& e : order_) {
      const long long v = std::max(0LL, std::min({sys.psi0(e.cls, e.station), row_left[e.cls], col_left[e.station]}));
      psi(e.cls, e.station) = v;
      row_left[e.cls] -= v;
      col_left[e.station] -= v;
    }
    for (const Edge& e : order_) {
      const long long v = std::min(row_left[e.cls], col_left[e.station]);
      if (v <= 0) continue;
      psi(e.cls, e.station) += v;
      row_left[e.cls] -= v;
      col_left[e.station] -= v;
    }
  }

  [[nodiscard]] const std::vector<Edge>& order() const { return order_; }

 private:
  std::vector<Edge> order_;
};

/// Heuristic stand-in for the null-controlling constructions. Starts from
/// GreedyBasic; whenever e.X >= e.N - margin * sqrt(n) it shifts delta units
/// along the most negative simple path (psi_ij -= s * delta), delta the
/// largest feasible amount, optionally capped at ceil(n^cap_exponent). Idle
/// servers on the path's activities, closing activity included, are then
/// given to waiting customers at every decision.
class NegativePathPump : public Policy {
 public:
  NegativePathPump(const NetworkModel& model, const FluidSolution& sol,
                   std::optional<double> cap_exponent = std::nullopt, double margin = 2.0,
                   double tol = kDefaultTol)
      : base_(model, sol), cap_exponent_(cap_exponent), margin_(margin) {
    const auto paths = enumerate_simple_paths(model, sol, tol);
    const auto verdict = throughput_verdict_paths(paths, tol);
    if (!verdict.witness_path) throw PolicyNotApplicable("no negative path: the model is throughput optimal");
    path_ = paths[*verdict.witness_path];
    for (const SignedEdge& se : path_.signed_edges) fill_order_.push_back(se.edge);
    std::stable_sort(fill_order_.begin(), fill_order_.end(), [&](const Edge& a, const Edge& b) {
      return model.mu(a.cls, a.station) > model.mu(b.cls, b.station);
    });
  }

  [[nodiscard]] std::string name() const override { return "negative-path"; }
  [[nodiscard]] bool heuristic() const override { return true; }

  [[nodiscard]] long long cap(long long n) const {
    if (!cap_exponent_) return std::numeric_limits<long long>::max();
    return static_cast<long long>(std::ceil(std::pow(static_cast<double>(n), *cap_exponent_) - 1e-9));
  }

  void assign(const SystemState& state, const SystemInstance& sys, CountMatrix& psi) const override {
    base_.assign(state, sys, psi);
    const double trigger = static_cast<double>(sys.total_servers()) - margin_ * std::sqrt(static_cast<double>(sys.n));
    if (static_cast<double>(state.total_customers()) >= trigger) {
      long long delta = cap(sys.n);
      for (const SignedEdge& se : path_.signed_edges)
        if (se.sign > 0) delta = std::min(delta, psi(se.edge.cls, se.edge.station));
      if (delta > 0)
        for (const SignedEdge& se : path_.signed_edges) psi(se.edge.cls, se.edge.station) -= se.sign * delta;
    }
    for (const Edge& e : fill_order_) {
      const long long v = std::min(state.X[e.cls] - psi.row_sum(e.cls), sys.N[e.station] - psi.col_sum(e.station));
      if (v > 0) psi(e.cls, e.station) += v;
    }
  }

  [[nodiscard]] const SimplePath& path() const { return path_; }
  [[nodiscard]] double margin() const { return margin_; }

 private:
  GreedyBasic base_;
  SimplePath path_;
  std::vector<Edge> fill_order_;
  std::optional<double> cap_exponent_;
  double margin_;
};

/// Never serves anyone.
class IdlePolicy : public Policy {
 public:
  [[nodiscard]] std::string name() const override { return "idle"; }
  void assign(const SystemState&, const SystemInstance& sys, CountMatrix& psi) const override {
    psi = CountMatrix(sys.classes(), sys.stations());
  }
};

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"greedy-basic", "negative-path", "idle"};
  return names;
}

/// Builds a shipped policy by name. Throws PolicyNotApplicable when the
/// model does not admit it and Error for an unknown name.
inline std::unique_ptr<Policy> make_policy(const std::string& name, const NetworkModel& model,
                                           const FluidSolution& sol) {
  if (name == "greedy-basic") return std::make_unique<GreedyBasic>(model, sol);
  if (name == "negative-path") return std::make_unique<NegativePathPump>(model, sol);
  if (name == "idle") return std::make_unique<IdlePolicy>();
  throw Error("unknown policy '" + name + "'");
}

}  // namespace pqnet

#endif  // PQNET_POLICIES_HPP
