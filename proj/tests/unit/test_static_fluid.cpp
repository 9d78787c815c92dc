#include <catch_amalgamated.hpp>

#include <map>
#include <numeric>
#include <random>

#include "pqnet/model_io.hpp"
#include "pqnet/static_fluid.hpp"

using namespace pqnet;
using Catch::Approx;

namespace {

NetworkModel model_file(const char* name) { return load_model(std::string(PQNET_MODELS_DIR) + "/" + name); }

bool spanning_tree(const std::vector<Edge>& edges, std::size_t I, std::size_t J) {
  if (edges.size() + 1 != I + J) return false;
  detail::DisjointSets ds(I + J);
  for (const Edge& e : edges)
    if (!ds.unite(e.cls, I + e.station)) return false;
  return true;
}

}  // namespace

TEST_CASE("Case A static allocation") {
  const auto m = model_file("case_a.json");
  const auto s = solve_static_allocation(m);
  const double expected[2][3] = {{1, 0.5, 0}, {0, 0.5, 1}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(s.xi_star(i, j) == Approx(expected[i][j]).margin(1e-9));
  CHECK(s.rho_star == Approx(1.0).margin(1e-9));
  CHECK(s.x_star[0] == Approx(1.5).margin(1e-9));
  CHECK(s.x_star[1] == Approx(1.5).margin(1e-9));
  CHECK(s.basic_edges == std::vector<Edge>{{0, 0}, {0, 1}, {1, 1}, {1, 2}});

  const auto r = check_assumptions(m, s);
  CHECK(r.critically_loaded);
  CHECK(r.unique);
  CHECK(r.mass_unique);
  CHECK(r.is_tree);
  CHECK(r.violations.empty());
}

TEST_CASE("minimal model") {
  const auto m = validate_model({1, 1, {2}, {1}, {{2}}});
  const auto s = solve_static_allocation(m);
  CHECK(s.xi_star(0, 0) == Approx(1.0).margin(1e-9));
  CHECK(s.rho_star == Approx(1.0).margin(1e-9));
  CHECK(s.x_star[0] == Approx(1.0).margin(1e-9));
  const auto r = check_assumptions(m, s);
  CHECK(r.is_tree);
  CHECK(r.all_ok());
}

TEST_CASE("infeasible and under-loaded models") {
  // class 2 has no activity at all
  const auto none = validate_model({2, 1, {1, 1}, {1}, {{1}, {0}}});
  CHECK_THROWS_AS(solve_static_allocation(none), InfeasibleModel);

  // station capacity cannot cover lambda even at full load
  const auto over = validate_model({1, 1, {3}, {1}, {{2}}});
  CHECK_THROWS_AS(solve_static_allocation(over), InfeasibleModel);

  const auto under = validate_model({1, 1, {1}, {1}, {{2}}});
  const auto s = solve_static_allocation(under);
  CHECK(s.rho_star == Approx(0.5).margin(1e-9));
  CHECK_FALSE(check_assumptions(under, s).critically_loaded);
}

TEST_CASE("disconnected blocks are not a tree") {
  const auto m = validate_model({2, 2, {1, 1}, {1, 1}, {{1, 0}, {0, 1}}});
  const auto s = solve_static_allocation(m);
  const auto r = check_assumptions(m, s);
  CHECK(r.critically_loaded);
  CHECK_FALSE(r.connected);
  CHECK_FALSE(r.is_tree);
  bool mentions = false;
  for (const auto& v : r.violations) mentions = mentions || v.find("disconnected") != std::string::npos;
  CHECK(mentions);
}

TEST_CASE("class-dependent rates: allocation not unique, mass vector unique") {
  const auto m = model_file("class_dependent_2x2.json");
  const auto s = solve_static_allocation(m);
  const auto r = check_assumptions(m, s);
  CHECK(r.critically_loaded);
  CHECK_FALSE(r.unique);
  CHECK(r.mass_unique);
  CHECK(s.x_star[0] == Approx(1.5).margin(1e-9));
  CHECK(s.x_star[1] == Approx(0.5).margin(1e-9));
}

TEST_CASE("fluid solution invariants") {
  for (const char* name : {"case_a.json", "case_b.json", "zero_path_2x2.json", "minimal_1x1.json"}) {
    const auto m = model_file(name);
    const auto s = solve_static_allocation(m);
    for (std::size_t i = 0; i < m.classes(); ++i) {
      double served = 0.0, row = 0.0;
      for (std::size_t j = 0; j < m.stations(); ++j) {
        CHECK(s.xi_star(i, j) >= -1e-12);
        served += m.mu(i, j) * m.nu()[j] * s.xi_star(i, j);
        row += s.psi_star(i, j);
        CHECK(s.psi_star(i, j) == Approx(s.xi_star(i, j) * m.nu()[j]).margin(1e-12));
      }
      CHECK(served == Approx(m.lambda()[i]).margin(1e-9));
      CHECK(row == Approx(s.x_star[i]).margin(1e-12));
    }
    for (std::size_t j = 0; j < m.stations(); ++j) {
      CHECK(s.xi_star.col_sum(j) <= s.rho_star + 1e-9);
      CHECK(s.psi_star.col_sum(j) == Approx(m.nu()[j]).margin(1e-9));
    }
  }
}

TEST_CASE("random bipartite trees are spanning and uniform on K_{2,2}") {
  std::mt19937_64 rng(17);
  std::map<std::vector<Edge>, int> counts;
  const int draws = 8000;
  for (int k = 0; k < draws; ++k) {
    auto t = detail::random_bipartite_tree(2, 2, rng);
    REQUIRE(spanning_tree(t, 2, 2));
    ++counts[t];
  }
  // K_{2,2} is a 4-cycle: exactly 4 spanning trees.
  REQUIRE(counts.size() == 4);
  for (const auto& [tree, c] : counts) CHECK(std::abs(c - draws / 4) < 4 * std::sqrt(draws * 0.25 * 0.75));

  for (std::size_t I = 1; I <= 4; ++I)
    for (std::size_t J = 1; J <= 4; ++J)
      for (int k = 0; k < 20; ++k) CHECK(spanning_tree(detail::random_bipartite_tree(I, J, rng), I, J));
}

TEST_CASE("tree path alternates and ends at the requested leaves") {
  const std::vector<Edge> tree{{0, 0}, {0, 1}, {1, 1}, {1, 2}};
  CHECK(detail::tree_path(tree, 2, 3, 1, 0) == std::vector<std::size_t>{1, 1, 0, 0});
  CHECK(detail::tree_path(tree, 2, 3, 0, 2) == std::vector<std::size_t>{0, 1, 1, 2});
  CHECK(detail::tree_path(tree, 2, 3, 0, 0) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("generator recovers its planted allocation") {
  CHECK(generate_critical_instance(1, 2, 2).planted.xi_star.rows() == 2);
  for (std::uint64_t seed = 0; seed < 60; ++seed)
    for (auto [I, J] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}, {3, 2}, {3, 3}, {1, 3}, {4, 2}}) {
      const auto g = generate_critical_instance(seed, I, J);
      const auto s = solve_static_allocation(g.model);
      CHECK(detail::allocations_match(s.xi_star, g.planted.xi_star, 1e-6));
      CHECK(s.rho_star == Approx(1.0).margin(1e-9));
      const auto r = check_assumptions(g.model, s);
      CHECK(r.all_ok());
      CHECK(s.basic_edges.size() == I + J - 1);
      CHECK(spanning_tree(s.basic_edges, I, J));
    }
}

TEST_CASE("generator is deterministic and handles 1x1") {
  const auto a = generate_critical_instance(7, 2, 3), b = generate_critical_instance(7, 2, 3);
  CHECK(a.model.mu() == b.model.mu());
  CHECK(a.seed_used == b.seed_used);
  CHECK(solve_static_allocation(a.model).rho_star == Approx(1.0).margin(1e-9));

  for (std::uint64_t seed : {0, 1, 2}) {
    const auto g = generate_critical_instance(seed, 1, 1);
    CHECK(g.planted.xi_star(0, 0) == Approx(1.0).margin(1e-12));
  }
  CHECK_THROWS_AS(generate_critical_instance(0, 0, 2), DimensionMismatch);
}

TEST_CASE("relabeling permutes the allocation") {
  const auto m = model_file("case_a.json");
  const std::vector<std::size_t> cp{1, 0}, sp{2, 0, 1};
  const auto p = relabel(m, cp, sp);
  const auto s = solve_static_allocation(m), sp_sol = solve_static_allocation(p);
  CHECK(sp_sol.rho_star == Approx(s.rho_star).margin(1e-9));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(sp_sol.xi_star(i, j) == Approx(s.xi_star(cp[i], sp[j])).margin(1e-9));
}
