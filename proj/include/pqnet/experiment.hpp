#ifndef PQNET_EXPERIMENT_HPP
#define PQNET_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/simulator.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `rep` at scale n.
inline std::uint64_t replication_seed(std::uint64_t seed, long long n, std::size_t rep) {
  const std::uint64_t key = splitmix64(static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(rep);
  return seed ^ splitmix64(key);
}

/// Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct OccupancySummary {
  long long n = 0;
  std::vector<double> occupancy;  // one entry per replication, rep order
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

inline OccupancySummary summarize(long long n, std::vector<double> occ) {
  OccupancySummary s;
  s.n = n;
  double sum = 0.0;
  for (double v : occ) sum += v;
  s.mean = sum / static_cast<double>(occ.size());
  s.median = quantile(occ, 0.5);
  s.q10 = quantile(occ, 0.1);
  s.q90 = quantile(occ, 0.9);
  s.occupancy = std::move(occ);
  return s;
}

struct ExperimentOptions {
  double T = 1.0;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  std::size_t sample_points = 0;  // per-replication trajectory grid
  std::size_t threads = 0;        // 0: hardware concurrency
};

struct ExperimentTable {
  std::string policy;
  bool heuristic_policy = false;
  double T = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<OccupancySummary> rows;
  std::vector<SimResult> runs;  // (n, rep) order

  [[nodiscard]] bool conservation_ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const SimResult& r) { return r.conservation.ok(); });
  }
};

/// Runs `reps` independent replications for every n. Replications execute on
/// a worker pool; results are stored by (n, rep) index, so the table does not
/// depend on scheduling.
inline ExperimentTable run_nc_experiment(const NetworkModel& model, const FluidSolution& sol, const Policy& policy,
                                         std::span<const long long> n_list, const ExperimentOptions& opt) {
  if (opt.reps < 1) throw Error("reps must be >= 1");
  for (std::size_t k = 1; k < n_list.size(); ++k)
    if (n_list[k] <= n_list[k - 1]) throw Error("n_list must be strictly ascending");

  std::vector<SystemInstance> systems;
  for (long long n : n_list) systems.push_back(build_system(model, sol, n));

  ExperimentTable table;
  table.policy = policy.name();
  table.heuristic_policy = policy.heuristic();
  table.T = opt.T;
  table.reps = opt.reps;
  table.seed = opt.seed;
  const std::size_t tasks = n_list.size() * opt.reps;
  table.runs.resize(tasks);

  SimOptions so;
  so.T = opt.T;
  so.sample_points = opt.sample_points;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks;) {
      const std::size_t ni = k / opt.reps, rep = k % opt.reps;
      try {
        table.runs[k] = simulate(systems[ni], policy, so, replication_seed(opt.seed, n_list[ni], rep), rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  std::size_t threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    std::vector<double> occ;
    for (std::size_t rep = 0; rep < opt.reps; ++rep) occ.push_back(table.runs[ni * opt.reps + rep].queue_occupancy);
    table.rows.push_back(summarize(n_list[ni], std::move(occ)));
  }
  return table;
}

/// Trajectory CSV: n, rep, t, X_1..X_I, Psi_i_j (row-major), occupancy_running.
inline void write_trajectory_csv(std::ostream& os, const ExperimentTable& table, const NetworkModel& model) {
  os << "n,rep,t";
  for (std::size_t i = 0; i < model.classes(); ++i) os << ",X_" << model.class_label(i);
  for (std::size_t i = 0; i < model.classes(); ++i)
    for (std::size_t j = 0; j < model.stations(); ++j)
      os << ",Psi_" << model.class_label(i) << '_' << model.station_label(j);
  os << ",occupancy_running\n";
  os << std::setprecision(10);
  for (const SimResult& r : table.runs)
    for (const TrajectorySample& s : r.samples) {
      os << r.n << ',' << r.rep << ',' << s.t;
      for (long long x : s.X) os << ',' << x;
      for (long long p : s.Psi.flat()) os << ',' << p;
      os << ',' << s.occupancy_running << '\n';
    }
}

inline nlohmann::json experiment_summary_json(const ExperimentTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"n", r.n},
                    {"mean", r.mean},
                    {"median", r.median},
                    {"q10", r.q10},
                    {"q90", r.q90},
                    {"occupancy", r.occupancy}});
  return {{"policy", table.policy},
          {"heuristic_policy", table.heuristic_policy},
          {"T", table.T},
          {"reps", table.reps},
          {"seed", table.seed},
          {"conservation_ok", table.conservation_ok()},
          {"rows", rows}};
}

}  // namespace pqnet

#endif  // PQNET_EXPERIMENT_HPP
