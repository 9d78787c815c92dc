#include <catch_amalgamated.hpp>

#include <random>
#include <string>

#include "pqnet/core_model.hpp"
#include "pqnet/model_io.hpp"

using namespace pqnet;

namespace {

RawModel case_a_raw() { return {2, 3, {8, 4}, {1, 1, 1}, {{3, 10, 1}, {1, 4, 2}}}; }

NetworkModel random_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  std::uniform_real_distribution<double> pos(0.1, 5.0), coin(0.0, 1.0);
  RawModel raw;
  raw.classes = dim(rng);
  raw.stations = dim(rng);
  for (std::size_t i = 0; i < raw.classes; ++i) raw.lambda.push_back(pos(rng));
  for (std::size_t j = 0; j < raw.stations; ++j) raw.nu.push_back(pos(rng));
  raw.mu.assign(raw.classes, std::vector<double>(raw.stations, 0.0));
  for (auto& row : raw.mu)
    for (double& v : row) v = coin(rng) < 0.3 ? 0.0 : pos(rng);
  return validate_model(raw);
}

}  // namespace

TEST_CASE("Case A validates and keeps its data") {
  const auto m = validate_model(case_a_raw());
  CHECK(m.classes() == 2);
  CHECK(m.stations() == 3);
  CHECK(m.mu(0, 1) == 10.0);
  CHECK(m.total_arrival_rate() == 12.0);
  CHECK(m.class_label(1) == 2);
  CHECK(m.station_label(0) == 3);
  CHECK(m.station_label(2) == 5);
}

TEST_CASE("minimal 1x1 model validates") {
  const auto m = validate_model({1, 1, {2}, {1}, {{2}}});
  CHECK(activity_set(m).size() == 1);
}

TEST_CASE("validation errors") {
  auto raw = case_a_raw();
  raw.lambda = {8, -4};
  CHECK_THROWS_AS(validate_model(raw), NonPositiveRate);

  raw = case_a_raw();
  raw.nu = {1, 0, 1};
  CHECK_THROWS_AS(validate_model(raw), NonPositiveRate);

  raw = case_a_raw();
  raw.mu[1][2] = -1;
  CHECK_THROWS_AS(validate_model(raw), NegativeServiceRate);

  raw = case_a_raw();
  raw.nu = {1, 1};
  CHECK_THROWS_AS(validate_model(raw), DimensionMismatch);

  raw = case_a_raw();
  raw.mu[0].pop_back();
  CHECK_THROWS_AS(validate_model(raw), DimensionMismatch);

  raw = case_a_raw();
  raw.classes = 0;
  CHECK_THROWS_AS(validate_model(raw), DimensionMismatch);

  // all three derive from ModelError
  raw = case_a_raw();
  raw.lambda[0] = 0;
  CHECK_THROWS_AS(validate_model(raw), ModelError);
}

TEST_CASE("activity sets of Case A and Case B") {
  const auto a = validate_model(case_a_raw());
  CHECK(activity_set(a).size() == 6);
  CHECK(activity_set(a).contains({1, 0}));

  auto raw = case_a_raw();
  raw.mu[1][0] = 0;  // mu_23 = 0
  const auto b = validate_model(raw);
  const auto acts = activity_set(b);
  CHECK(acts.size() == 5);
  CHECK_FALSE(acts.contains({1, 0}));

  const auto single = validate_model({2, 2, {1, 1}, {1, 1}, {{1, 0}, {0, 0}}});
  REQUIRE(activity_set(single).size() == 1);
  CHECK(activity_set(single).edges[0] == Edge{0, 0});
}

TEST_CASE("effective rates") {
  const auto a = validate_model(case_a_raw());
  CHECK(effective_rates(a).mubar == a.mu());

  auto raw = case_a_raw();
  raw.nu = {2, 2, 2};
  const auto r = effective_rates(validate_model(raw)).mubar;
  CHECK(r(0, 0) == 6.0);
  CHECK(r(0, 1) == 20.0);
  CHECK(r(0, 2) == 2.0);
}

TEST_CASE("effective rates match elementwise products on random models") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(rng);
    const auto raw = m.to_raw();
    const auto r = effective_rates(m).mubar;
    const auto acts = activity_set(m);
    for (std::size_t i = 0; i < raw.classes; ++i)
      for (std::size_t j = 0; j < raw.stations; ++j) {
        CHECK(r(i, j) == raw.mu[i][j] * raw.nu[j]);
        CHECK((r(i, j) > 0.0) == acts.contains({i, j}));
        CHECK((raw.mu[i][j] > 0.0) == acts.contains({i, j}));
      }
  }
}

TEST_CASE("activity set and effective rates commute with relabeling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_model(rng);
    std::vector<std::size_t> cp(m.classes()), sp(m.stations());
    std::iota(cp.begin(), cp.end(), 0);
    std::iota(sp.begin(), sp.end(), 0);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::shuffle(sp.begin(), sp.end(), rng);
    const auto p = relabel(m, cp, sp);
    const auto r = effective_rates(m).mubar, rp = effective_rates(p).mubar;
    const auto acts = activity_set(m), acts_p = activity_set(p);
    CHECK(acts.size() == acts_p.size());
    for (std::size_t i = 0; i < m.classes(); ++i)
      for (std::size_t j = 0; j < m.stations(); ++j) {
        CHECK(rp(i, j) == r(cp[i], sp[j]));
        CHECK(acts_p.contains({i, j}) == acts.contains({cp[i], sp[j]}));
      }
  }
}

TEST_CASE("model JSON round trip") {
  const auto m = load_model(std::string(PQNET_MODELS_DIR) + "/case_a.json");
  const auto again = parse_model(to_json(m).dump());
  CHECK(again.mu() == m.mu());
  CHECK(std::vector<double>(again.lambda().begin(), again.lambda().end()) == std::vector<double>{8, 4});
  CHECK(std::vector<double>(again.nu().begin(), again.nu().end()) == std::vector<double>{1, 1, 1});
}

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"classes\": 1,\n  \"stations\": 1,\n  \"lambda\": [1,],\n}";
  try {
    parse_model(text);
    FAIL("expected a parse error");
  } catch (const ModelParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() > 0);
  }
  CHECK_THROWS_AS(parse_model(R"({"classes": 1, "stations": 1, "lambda": [1], "nu": [1]})"), ModelParseError);
  CHECK_THROWS_AS(parse_model(R"({"classes": 1, "stations": 1, "lambda": [1], "nu": [1], "mu": "x"})"),
                  ModelParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ModelParseError);
}
