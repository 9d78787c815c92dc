#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "pqnet/linprog.hpp"

using namespace pqnet;
using Catch::Approx;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void check_feasible(const LinearProgram& lp, const LPResult& r, double tol = 1e-9) {
  for (double v : r.x) CHECK(v >= -tol);
  for (const auto& c : lp.eq_constraints) CHECK(std::abs(dot(c.coeffs, r.x) - c.rhs) <= tol * (1 + std::abs(c.rhs)));
  for (const auto& c : lp.ub_constraints) CHECK(dot(c.coeffs, r.x) <= c.rhs + tol * (1 + std::abs(c.rhs)));
}

// min -sum w_ij y_ij  s.t. row sums <= a_i, column sums <= b_j (and optionally
// row sums = a_i), y >= 0.
LinearProgram transportation(std::mt19937_64& rng, std::size_t I, std::size_t J, bool equality_rows) {
  std::uniform_real_distribution<double> w(0.0, 10.0), cap(0.2, 2.0);
  LinearProgram lp(I * J);
  for (double& c : lp.objective) c = -w(rng);
  std::vector<double> a(I), b(J);
  for (double& v : a) v = cap(rng);
  for (double& v : b) v = cap(rng);
  if (equality_rows) {
    // keep rows feasible: total row demand below total capacity
    double ta = 0, tb = 0;
    for (double v : a) ta += v;
    for (double v : b) tb += v;
    if (ta > tb)
      for (double& v : a) v *= 0.9 * tb / ta;
  }
  for (std::size_t i = 0; i < I; ++i) {
    std::vector<double> row(I * J, 0.0);
    for (std::size_t j = 0; j < J; ++j) row[i * J + j] = 1.0;
    if (equality_rows)
      lp.add_eq(row, a[i]);
    else
      lp.add_ub(row, a[i]);
  }
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> col(I * J, 0.0);
    for (std::size_t i = 0; i < I; ++i) col[i * J + j] = 1.0;
    lp.add_ub(col, b[j]);
  }
  return lp;
}

}  // namespace

TEST_CASE("single variable bounded below") {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add_ub({-1.0}, -3.0);
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == Approx(3.0).margin(1e-12));
  CHECK(r.x[0] == Approx(3.0).margin(1e-12));
}

TEST_CASE("infeasible and unbounded programs are reported") {
  LinearProgram inf(2);
  inf.objective = {1, 1};
  inf.add_eq({1, 1}, 1);
  inf.add_ub({1, 1}, 0.5);
  CHECK(solve_lp(inf).status == LPStatus::Infeasible);

  LinearProgram unb(2);
  unb.objective = {-1, 0};
  unb.add_ub({-1, 1}, 1);
  CHECK(solve_lp(unb).status == LPStatus::Unbounded);

  LinearProgram neg(1);
  neg.objective = {1};
  neg.add_eq({1}, -2);  // x >= 0 cannot meet x = -2
  CHECK(solve_lp(neg).status == LPStatus::Infeasible);
}

TEST_CASE("programs without constraints") {
  LinearProgram lp(2);
  lp.objective = {1, 2};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == 0.0);
  lp.objective = {1, -2};
  CHECK(solve_lp(lp).status == LPStatus::Unbounded);
}

TEST_CASE("redundant equality rows") {
  LinearProgram lp(2);
  lp.objective = {1, 2};
  lp.add_eq({1, 1}, 1);
  lp.add_eq({2, 2}, 2);
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.value == Approx(1.0).margin(1e-12));
  check_feasible(lp, r);
}

TEST_CASE("transportation programs match vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t I = dim(rng), J = dim(rng);
    if (I * J > 6) J = 6 / I;  // keep the enumeration small
    const bool eq = trial % 2 == 1;
    const auto lp = transportation(rng, I, J, eq);
    const auto r = solve_lp(lp);
    const auto brute = oracle::brute_force_min(lp);
    REQUIRE(brute.has_value());
    REQUIRE(r.status == LPStatus::Optimal);
    CHECK(r.value == Approx(*brute).margin(1e-9 * (1 + std::abs(*brute))));
    check_feasible(lp, r);
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("weak duality spot check: optimum is below every feasible point") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lp = transportation(rng, 2, 3, false);
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LPStatus::Optimal);
    for (int k = 0; k < 50; ++k) {
      // random scaled-down point of the box, then shrink until feasible
      std::vector<double> x(lp.n_vars);
      for (double& v : x) v = unit(rng);
      double scale = 1.0;
      for (const auto& c : lp.ub_constraints) {
        const double v = dot(c.coeffs, x);
        if (v > c.rhs) scale = std::min(scale, c.rhs / v);
      }
      for (double& v : x) v *= scale;
      CHECK(r.value <= dot(lp.objective, x) + 1e-12);
    }
  }
}

TEST_CASE("solve_lp is deterministic") {
  std::mt19937_64 rng(3);
  const auto lp = transportation(rng, 3, 2, true);
  const auto a = solve_lp(lp), b = solve_lp(lp);
  CHECK(a.status == b.status);
  CHECK(a.value == b.value);
  CHECK(a.x == b.x);
}

TEST_CASE("optimal range on unique and degenerate faces") {
  LinearProgram unique(2);
  unique.objective = {1, 2};
  unique.add_eq({1, 1}, 1);
  const auto r = solve_lp(unique);
  const auto [lo, hi] = optimal_range(unique, 0, r.value);
  CHECK(hi - lo <= 2e-9);
  CHECK(lo == Approx(1.0).margin(1e-9));

  LinearProgram flat(2);
  flat.objective = {0, 0};
  flat.add_eq({1, 1}, 1);
  const auto [flo, fhi] = optimal_range(flat, 0, 0.0);
  CHECK(flo == Approx(0.0).margin(1e-9));
  CHECK(fhi == Approx(1.0).margin(1e-9));
}

TEST_CASE("iteration cap raises NumericalFailure") {
  LinearProgram lp(3);
  lp.objective = {-1, -1, -1};
  lp.add_ub({1, 1, 1}, 1);
  SimplexOptions opt;
  opt.max_iterations = 0;
  CHECK_THROWS_AS(solve_lp(lp, opt), NumericalFailure);
}
