#ifndef PQNET_CORE_MODEL_HPP
#define PQNET_CORE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pqnet/errors.hpp"
#include "pqnet/matrix.hpp"

namespace pqnet {

/// Absolute tolerance used for every zero/sign classification in the library.
inline constexpr double kDefaultTol = 1e-9;

/// A class-station pair, 0-based on both sides. Reports use the 1-based
/// vertex labels from `class_label` / `station_label`.
struct Edge {
  std::size_t cls = 0;
  std::size_t station = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unvalidated model data, as read from a file or built in code.
struct RawModel {
  std::size_t classes = 0;
  std::size_t stations = 0;
  std::vector<double> lambda;
  std::vector<double> nu;
  std::vector<std::vector<double>> mu;
};

/// Primitive data of a static fluid model: arrival rates, pool capacities and
/// per-capacity service rates. Only `validate_model` constructs one, so every
/// instance satisfies the positivity and shape invariants.
class NetworkModel {
 public:
  [[nodiscard]] std::size_t classes() const noexcept { return lambda_.size(); }
  [[nodiscard]] std::size_t stations() const noexcept { return nu_.size(); }
  [[nodiscard]] std::span<const double> lambda() const noexcept { return lambda_; }
  [[nodiscard]] std::span<const double> nu() const noexcept { return nu_; }
  [[nodiscard]] const RealMatrix& mu() const noexcept { return mu_; }
  [[nodiscard]] double mu(std::size_t i, std::size_t j) const { return mu_(i, j); }
  [[nodiscard]] bool is_activity(std::size_t i, std::size_t j) const { return mu_(i, j) > 0.0; }
  [[nodiscard]] bool is_activity(Edge e) const { return is_activity(e.cls, e.station); }

  /// 1-based labels: classes 1..I, stations I+1..I+J.
  [[nodiscard]] std::size_t class_label(std::size_t i) const noexcept { return i + 1; }
  [[nodiscard]] std::size_t station_label(std::size_t j) const noexcept { return classes() + j + 1; }

  [[nodiscard]] double total_arrival_rate() const {
    double s = 0.0;
    for (double l : lambda_) s += l;
    return s;
  }

  [[nodiscard]] RawModel to_raw() const {
    RawModel raw{classes(), stations(), lambda_, nu_, {}};
    for (std::size_t i = 0; i < classes(); ++i) {
      auto r = mu_.row(i);
      raw.mu.emplace_back(r.begin(), r.end());
    }
    return raw;
  }

  friend NetworkModel validate_model(const RawModel& raw);

 private:
  NetworkModel(std::vector<double> lambda, std::vector<double> nu, RealMatrix mu)
      : lambda_(std::move(lambda)), nu_(std::move(nu)), mu_(std::move(mu)) {}

  std::vector<double> lambda_;
  std::vector<double> nu_;
  RealMatrix mu_;
};

/// Checks shape and sign constraints and returns an immutable model.
/// Throws DimensionMismatch, NonPositiveRate or NegativeServiceRate.
inline NetworkModel validate_model(const RawModel& raw) {
  const std::size_t I = raw.classes;
  const std::size_t J = raw.stations;
  if (I == 0 || J == 0) throw DimensionMismatch("model needs at least one class and one station");
  if (raw.lambda.size() != I) {
    throw DimensionMismatch("lambda has " + std::to_string(raw.lambda.size()) +
                            " entries, expected " + std::to_string(I));
  }
  if (raw.nu.size() != J) {
    throw DimensionMismatch("nu has " + std::to_string(raw.nu.size()) + " entries, expected " +
                            std::to_string(J));
  }
  if (raw.mu.size() != I) {
    throw DimensionMismatch("mu has " + std::to_string(raw.mu.size()) + " rows, expected " +
                            std::to_string(I));
  }
  RealMatrix mu(I, J);
  for (std::size_t i = 0; i < I; ++i) {
    if (raw.mu[i].size() != J) {
      throw DimensionMismatch("mu row " + std::to_string(i + 1) + " has " +
                              std::to_string(raw.mu[i].size()) + " entries, expected " +
                              std::to_string(J));
    }
    for (std::size_t j = 0; j < J; ++j) {
      const double v = raw.mu[i][j];
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream os;
        os << "mu(" << i + 1 << "," << I + j + 1 << ") = " << v << " must be finite and >= 0";
        throw NegativeServiceRate(os.str());
      }
      mu(i, j) = v;
    }
  }
  for (std::size_t i = 0; i < I; ++i) {
    if (!std::isfinite(raw.lambda[i]) || raw.lambda[i] <= 0.0) {
      std::ostringstream os;
      os << "lambda_" << i + 1 << " = " << raw.lambda[i] << " must be > 0";
      throw NonPositiveRate(os.str());
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (!std::isfinite(raw.nu[j]) || raw.nu[j] <= 0.0) {
      std::ostringstream os;
      os << "nu_" << I + j + 1 << " = " << raw.nu[j] << " must be > 0";
      throw NonPositiveRate(os.str());
    }
  }
  return NetworkModel(raw.lambda, raw.nu, std::move(mu));
}

/// Pairs with a positive service rate, in (class, station) lexicographic order.
struct ActivitySet {
  std::vector<Edge> edges;

  [[nodiscard]] bool contains(Edge e) const {
    return std::binary_search(edges.begin(), edges.end(), e);
  }
  [[nodiscard]] std::size_t size() const noexcept { return edges.size(); }
};

inline ActivitySet activity_set(const NetworkModel& model) {
  ActivitySet acts;
  for (std::size_t i = 0; i < model.classes(); ++i)
    for (std::size_t j = 0; j < model.stations(); ++j)
      if (model.is_activity(i, j)) acts.edges.push_back({i, j});
  return acts;
}

/// mubar_ij = mu_ij * nu_j: the processing rate of station j when fully
/// allocated to class i.
struct EffectiveRates {
  RealMatrix mubar;
};

inline EffectiveRates effective_rates(const NetworkModel& model) {
  EffectiveRates r{RealMatrix(model.classes(), model.stations())};
  for (std::size_t i = 0; i < model.classes(); ++i)
    for (std::size_t j = 0; j < model.stations(); ++j) r.mubar(i, j) = model.mu(i, j) * model.nu()[j];
  return r;
}

/// Relabels classes and stations: class i of the result is class
/// `class_perm[i]` of `model`, likewise for stations.
inline NetworkModel relabel(const NetworkModel& model, std::span<const std::size_t> class_perm,
                            std::span<const std::size_t> station_perm) {
  const std::size_t I = model.classes();
  const std::size_t J = model.stations();
  if (class_perm.size() != I || station_perm.size() != J)
    throw DimensionMismatch("permutation sizes do not match the model");
  RawModel raw{I, J, std::vector<double>(I), std::vector<double>(J),
               std::vector<std::vector<double>>(I, std::vector<double>(J))};
  for (std::size_t i = 0; i < I; ++i) raw.lambda[i] = model.lambda()[class_perm[i]];
  for (std::size_t j = 0; j < J; ++j) raw.nu[j] = model.nu()[station_perm[j]];
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j) raw.mu[i][j] = model.mu(class_perm[i], station_perm[j]);
  return validate_model(raw);
}

}  // namespace pqnet

#endif  // PQNET_CORE_MODEL_HPP
