#ifndef PQNET_LINPROG_HPP
#define PQNET_LINPROG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <optional>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"

namespace pqnet {

struct LinearConstraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

/// minimize objective . x  subject to  eq: a.x = b,  ub: a.x <= b,  x >= 0.
struct LinearProgram {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<LinearConstraint> eq_constraints;
  std::vector<LinearConstraint> ub_constraints;

  explicit LinearProgram(std::size_t n = 0) : n_vars(n), objective(n, 0.0) {}

  void add_eq(std::vector<double> a, double b) { eq_constraints.push_back({std::move(a), b}); }
  void add_ub(std::vector<double> a, double b) { ub_constraints.push_back({std::move(a), b}); }
  [[nodiscard]] std::size_t constraint_count() const {
    return eq_constraints.size() + ub_constraints.size();
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  std::vector<double> x;  // filled when Optimal
  double value = 0.0;     // filled when Optimal
};

struct SimplexOptions {
  double tol = kDefaultTol;  // feasibility / optimality
  double pivot_tol = 1e-10;
  std::optional<std::size_t> max_iterations;  // default 50 * (n_vars + constraints)
};

namespace detail {

/// Two-phase revised simplex on the equality form A x = b, x >= 0, b >= 0.
/// The basis inverse is refactored from scratch every iteration; the
/// problems solved here have at most a few dozen rows. Entering and leaving
/// variables follow Bland's rule (lowest index), so the reported vertex is a
/// deterministic function of the input.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt), n_orig_(lp.n_vars) {
    for (const auto& c : lp.eq_constraints) check_width(c, lp.n_vars);
    for (const auto& c : lp.ub_constraints) check_width(c, lp.n_vars);
    if (lp.objective.size() != lp.n_vars)
      throw DimensionMismatch("objective length differs from n_vars");

    m_ = lp.constraint_count();
    const std::size_t n_slack = lp.ub_constraints.size();
    n_struct_ = n_orig_ + n_slack;  // structural + slack columns
    n_total_ = n_struct_ + m_;      // one artificial per row
    A_.assign(m_, std::vector<double>(n_total_, 0.0));
    b_.assign(m_, 0.0);
    cost_.assign(n_total_, 0.0);
    for (std::size_t k = 0; k < n_orig_; ++k) cost_[k] = lp.objective[k];

    std::size_t r = 0;
    for (const auto& c : lp.eq_constraints) {
      std::copy(c.coeffs.begin(), c.coeffs.end(), A_[r].begin());
      b_[r] = c.rhs;
      ++r;
    }
    for (std::size_t s = 0; s < n_slack; ++s, ++r) {
      const auto& c = lp.ub_constraints[s];
      std::copy(c.coeffs.begin(), c.coeffs.end(), A_[r].begin());
      A_[r][n_orig_ + s] = 1.0;
      b_[r] = c.rhs;
    }
    basis_.assign(m_, 0);
    for (std::size_t row = 0; row < m_; ++row) {
      if (b_[row] < 0.0) {
        for (double& a : A_[row]) a = -a;
        b_[row] = -b_[row];
      }
      A_[row][n_struct_ + row] = 1.0;
      // A slack with coefficient +1 after sign normalization can start basic.
      const bool slack_row = row >= lp.eq_constraints.size();
      const std::size_t slack_col = slack_row ? n_orig_ + (row - lp.eq_constraints.size()) : 0;
      basis_[row] = (slack_row && A_[row][slack_col] > 0.0) ? slack_col : n_struct_ + row;
    }
    max_iter_ = opt.max_iterations.value_or(50 * (lp.n_vars + lp.constraint_count()));
    b_scale_ = 1.0;
    for (double v : b_) b_scale_ = std::max(b_scale_, std::abs(v));
  }

  LPResult run() {
    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1(n_total_, 0.0);
    bool any_artificial = false;
    for (std::size_t row = 0; row < m_; ++row) {
      phase1[n_struct_ + row] = 1.0;
      if (basis_[row] >= n_struct_) any_artificial = true;
    }
    if (any_artificial) {
      if (iterate(phase1, /*allow_artificial=*/true) != LPStatus::Optimal)
        throw NumericalFailure("phase 1 reported unbounded");
      double infeas = 0.0;
      const auto xb = basic_values();
      for (std::size_t row = 0; row < m_; ++row)
        if (basis_[row] >= n_struct_) infeas += xb[row];
      if (infeas > opt_.tol * b_scale_) return {LPStatus::Infeasible, {}, 0.0};
      drive_out_artificials();
    }
    const LPStatus st = iterate(cost_, /*allow_artificial=*/false);
    if (st == LPStatus::Unbounded) return {LPStatus::Unbounded, {}, 0.0};

    LPResult res;
    res.status = LPStatus::Optimal;
    res.x.assign(n_orig_, 0.0);
    const auto xb = basic_values();
    for (std::size_t row = 0; row < m_; ++row)
      if (basis_[row] < n_orig_) res.x[basis_[row]] = xb[row];
    for (double& v : res.x)
      if (std::abs(v) <= 1e-12) v = 0.0;
    res.value = 0.0;
    for (std::size_t k = 0; k < n_orig_; ++k) res.value += cost_[k] * res.x[k];
    return res;
  }

 private:
  static void check_width(const LinearConstraint& c, std::size_t n) {
    if (c.coeffs.size() != n) throw DimensionMismatch("constraint width differs from n_vars");
  }

  // Inverse of the current basis matrix by Gauss-Jordan with partial pivoting.
  void refactor() {
    std::vector<std::vector<double>> B(m_, std::vector<double>(2 * m_, 0.0));
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t c = 0; c < m_; ++c) B[r][c] = A_[r][basis_[c]];
      B[r][m_ + r] = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(B[r][c]) > std::abs(B[piv][c])) piv = r;
      if (std::abs(B[piv][c]) < 1e-14) throw NumericalFailure("singular basis matrix");
      std::swap(B[piv], B[c]);
      const double d = B[c][c];
      for (double& v : B[c]) v /= d;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c || B[r][c] == 0.0) continue;
        const double f = B[r][c];
        for (std::size_t k = 0; k < 2 * m_; ++k) B[r][k] -= f * B[c][k];
      }
    }
    binv_.assign(m_, std::vector<double>(m_));
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) binv_[r][c] = B[r][m_ + c];
  }

  [[nodiscard]] std::vector<double> basic_values() const {
    std::vector<double> xb(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) xb[r] += binv_[r][c] * b_[c];
    return xb;
  }

  [[nodiscard]] std::vector<double> column(std::size_t j) const {
    std::vector<double> u(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) u[r] += binv_[r][c] * A_[c][j];
    return u;
  }

  LPStatus iterate(const std::vector<double>& cost, bool allow_artificial) {
    const std::size_t limit = allow_artificial ? n_total_ : n_struct_;
    for (;;) {
      if (++iterations_ > max_iter_) {
        throw NumericalFailure("simplex exceeded the iteration cap of " + std::to_string(max_iter_));
      }
      refactor();
      // Simplex multipliers y = c_B^T B^{-1}.
      std::vector<double> y(m_, 0.0);
      for (std::size_t c = 0; c < m_; ++c)
        for (std::size_t r = 0; r < m_; ++r) y[c] += cost[basis_[r]] * binv_[r][c];

      std::vector<bool> in_basis(n_total_, false);
      for (std::size_t b : basis_) in_basis[b] = true;

      std::size_t entering = n_total_;
      for (std::size_t j = 0; j < limit; ++j) {
        if (in_basis[j]) continue;
        double d = cost[j];
        for (std::size_t r = 0; r < m_; ++r) d -= y[r] * A_[r][j];
        if (d < -opt_.tol) {
          entering = j;
          break;
        }
      }
      if (entering == n_total_) return LPStatus::Optimal;

      const auto u = column(entering);
      const auto xb = basic_values();
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        if (u[r] <= opt_.pivot_tol) continue;
        const double ratio = std::max(xb[r], 0.0) / u[r];
        if (leave == m_) {
          leave = r;
          best = ratio;
          continue;
        }
        const double slack = 1e-12 * (1.0 + std::abs(best));
        if (ratio < best - slack) {
          leave = r;
          best = ratio;
        } else if (ratio <= best + slack && basis_[r] < basis_[leave]) {
          leave = r;
          best = std::min(best, ratio);
        }
      }
      if (leave == m_) return LPStatus::Unbounded;
      basis_[leave] = entering;
    }
  }

  // After phase 1, replace artificials sitting at zero by structural columns
  // where the row allows it; rows that are linear combinations of others keep
  // their artificial, which then stays at zero.
  void drive_out_artificials() {
    refactor();
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_struct_) continue;
      std::vector<bool> in_basis(n_total_, false);
      for (std::size_t b : basis_) in_basis[b] = true;
      for (std::size_t j = 0; j < n_struct_; ++j) {
        if (in_basis[j]) continue;
        double v = 0.0;
        for (std::size_t c = 0; c < m_; ++c) v += binv_[r][c] * A_[c][j];
        if (std::abs(v) > 1e-7) {
          basis_[r] = j;
          refactor();
          break;
        }
      }
    }
  }

  SimplexOptions opt_;
  std::size_t n_orig_ = 0, n_struct_ = 0, n_total_ = 0, m_ = 0;
  std::vector<std::vector<double>> A_;
  std::vector<double> b_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<double>> binv_;
  std::size_t iterations_ = 0;
  std::size_t max_iter_ = 0;
  double b_scale_ = 1.0;
};

}  // namespace detail

/// Solves a small dense LP by two-phase revised simplex with Bland's rule.
/// Throws NumericalFailure when the iteration cap 50*(n_vars + constraints)
/// is exceeded or the basis becomes singular.
inline LPResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {}) {
  if (lp.constraint_count() == 0) {
    // Only x >= 0: optimal at 0 unless some cost is negative.
    for (double c : lp.objective)
      if (c < -opt.tol) return {LPStatus::Unbounded, {}, 0.0};
    return {LPStatus::Optimal, std::vector<double>(lp.n_vars, 0.0), 0.0};
  }
  return detail::RevisedSimplex(lp, opt).run();
}

/// Range [lo, hi] of x_var over the optimal face {x feasible : objective.x = opt_value}.
inline std::pair<double, double> optimal_range(const LinearProgram& lp, std::size_t var,
                                               double opt_value, const SimplexOptions& opt = {}) {
  if (var >= lp.n_vars) throw DimensionMismatch("optimal_range: variable index out of range");
  LinearProgram face = lp;
  face.add_eq(lp.objective, opt_value);
  face.objective.assign(lp.n_vars, 0.0);
  face.objective[var] = 1.0;
  const LPResult lo = solve_lp(face, opt);
  face.objective[var] = -1.0;
  const LPResult hi = solve_lp(face, opt);
  if (lo.status != LPStatus::Optimal || hi.status != LPStatus::Optimal)
    throw NumericalFailure("optimal face probe did not solve to optimality");
  return {lo.x[var], hi.x[var]};
}

}  // namespace pqnet

#endif  // PQNET_LINPROG_HPP
