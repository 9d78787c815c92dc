#ifndef PQNET_SIMULATOR_HPP
#define PQNET_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/matrix.hpp"
#include "pqnet/static_fluid.hpp"

namespace pqnet {

/// Parameters of the n-th system in the many-server scaling.
struct SystemInstance {
  long long n = 1;
  std::vector<double> lambda_n;  // n * lambda_i, arrivals per unit time
  std::vector<long long> N;      // servers per pool, round(n * nu_j)
  RealMatrix mu;                 // per-server service rates (unscaled)
  std::vector<long long> x0;     // initial head counts, round(n * x*_i)
  CountMatrix psi0;              // round(n * psi*_ij), the fluid split of x0
  // Fluid reference used for centering.
  std::vector<double> x_star;
  std::vector<double> nu;
  RealMatrix psi_star;
  double bound_c = 0.0;  // constant c of the second-order bound

  [[nodiscard]] std::size_t classes() const { return lambda_n.size(); }
  [[nodiscard]] std::size_t stations() const { return N.size(); }
  [[nodiscard]] bool is_activity(std::size_t i, std::size_t j) const { return mu(i, j) > 0.0; }
  [[nodiscard]] long long total_servers() const {
    long long s = 0;
    for (long long v : N) s += v;
    return s;
  }
};

namespace detail {
// Halves round up; the 1e-9 relative slack keeps LP round-off such as
// 9.4999999999 from deciding the direction.
inline long long round_half_up(double v) {
  return static_cast<long long>(std::floor(v + 0.5 + 1e-9 * std::max(1.0, std::abs(v))));
}
}  // namespace detail

/// Rounds the fluid data to the n-th system and asserts
///   |lambda^n/n - lambda| + |mu^n - mu| + |X(0)/n - x*| <= c n^{-1/2},  c = I+J+1,
///   |N/n - nu| <= (1/2) n^{-1/2}
/// (L1 norms). Throws ScalingViolation when rounding breaks either bound.
inline SystemInstance build_system(const NetworkModel& model, const FluidSolution& sol, long long n) {
  if (n < 1) throw ScalingViolation("scale n must be >= 1");
  const std::size_t I = model.classes(), J = model.stations();
  const double dn = static_cast<double>(n);
  SystemInstance sys;
  sys.n = n;
  sys.mu = model.mu();
  sys.x_star = sol.x_star;
  sys.nu.assign(model.nu().begin(), model.nu().end());
  sys.psi_star = sol.psi_star;
  sys.bound_c = static_cast<double>(I + J + 1);
  sys.psi0 = CountMatrix(I, J);
  for (std::size_t i = 0; i < I; ++i) {
    sys.lambda_n.push_back(dn * model.lambda()[i]);
    sys.x0.push_back(detail::round_half_up(dn * sol.x_star[i]));
    for (std::size_t j = 0; j < J; ++j)
      if (model.is_activity(i, j)) sys.psi0(i, j) = detail::round_half_up(dn * sol.psi_star(i, j));
  }
  for (std::size_t j = 0; j < J; ++j) sys.N.push_back(detail::round_half_up(dn * model.nu()[j]));

  const double root = std::sqrt(dn);
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    first += std::abs(sys.lambda_n[i] / dn - model.lambda()[i]);
    first += std::abs(static_cast<double>(sys.x0[i]) / dn - sol.x_star[i]);
  }
  for (std::size_t j = 0; j < J; ++j) second += std::abs(static_cast<double>(sys.N[j]) / dn - model.nu()[j]);
  constexpr double slack = 1e-12;
  if (first > sys.bound_c / root + slack || second > 0.5 / root + slack) {
    std::ostringstream os;
    os << "rounding at n=" << n << " breaks the scaling bounds: first-order error " << first
       << " (limit " << sys.bound_c / root << "), capacity error " << second << " (limit "
       << 0.5 / root << ")";
    throw ScalingViolation(os.str());
  }
  return sys;
}

/// Head counts and in-service counts at one instant.
struct SystemState {
  double t = 0.0;
  std::vector<long long> X;
  CountMatrix Psi;

  [[nodiscard]] long long queue(std::size_t i) const { return X[i] - Psi.row_sum(i); }
  [[nodiscard]] long long idle(const SystemInstance& sys, std::size_t j) const {
    return sys.N[j] - Psi.col_sum(j);
  }
  [[nodiscard]] long long total_customers() const {
    long long s = 0;
    for (long long v : X) s += v;
    return s;
  }
};

/// A scheduling control: maps the current state to an in-service matrix.
/// Called after every event; preemption is allowed. Implementations must be
/// stateless (const) so one instance can drive concurrent replications.
class Policy {
 public:
  virtual ~Policy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  /// True for stand-ins that are not the constructions from the literature.
  [[nodiscard]] virtual bool heuristic() const { return false; }
  /// Writes the new assignment into `psi` (pre-sized I x J, holding the
  /// current assignment on entry).
  virtual void assign(const SystemState& state, const SystemInstance& sys, CountMatrix& psi) const = 0;
};

/// Returns an empty string when psi is admissible for the given head counts.
inline std::string check_assignment(const CountMatrix& psi, const std::vector<long long>& X,
                                    const SystemInstance& sys) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sys.classes(); ++i) {
    for (std::size_t j = 0; j < sys.stations(); ++j) {
      if (psi(i, j) < 0) os << "negative Psi(" << i + 1 << "," << j + 1 << "); ";
      if (psi(i, j) != 0 && !sys.is_activity(i, j))
        os << "Psi(" << i + 1 << "," << j + 1 << ") on a non-activity; ";
    }
    if (psi.row_sum(i) > X[i]) os << "class " << i + 1 << " serves more customers than present; ";
  }
  for (std::size_t j = 0; j < sys.stations(); ++j)
    if (psi.col_sum(j) > sys.N[j]) os << "pool " << j + 1 << " exceeds its server count; ";
  return os.str();
}

struct SimOptions {
  double T = 1.0;
  double warmup = 0.0;           // window occupancy counts time after this
  std::size_t sample_points = 100;  // trajectory grid size (0 disables sampling)
  bool check_conservation = true;
};

struct TrajectorySample {
  double t = 0.0;
  std::vector<long long> X;
  CountMatrix Psi;
  double occupancy_running = 0.0;
};

/// Per-event bookkeeping of the balance identities.
struct ConservationLog {
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first_violation;

  [[nodiscard]] bool ok() const { return violations == 0; }
};

struct SimResult {
  long long n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::string policy;
  bool heuristic_policy = false;
  double T = 0.0;
  double warmup = 0.0;
  double queue_occupancy = 0.0;   // time in [0, T] with e.X >= e.N
  double window_occupancy = 0.0;  // same, restricted to [warmup, T]
  std::size_t events = 0;
  std::vector<long long> arrivals;
  CountMatrix completions;
  std::vector<long long> x0;
  std::vector<long long> final_X;
  std::vector<TrajectorySample> samples;
  ConservationLog conservation;
};

namespace detail {

inline void audit_state(const SystemState& s, const SystemInstance& sys, const std::vector<long long>& x0,
                        const std::vector<long long>& arrivals, const CountMatrix& completions,
                        std::size_t event, ConservationLog& log) {
  ++log.checks;
  std::ostringstream os;
  for (std::size_t i = 0; i < sys.classes(); ++i) {
    // X_i(t) = X_i(0) + A_i(t) - sum_j D_ij(t)
    if (s.X[i] != x0[i] + arrivals[i] - completions.row_sum(i)) os << "counting identity, class " << i + 1 << "; ";
    if (s.queue(i) < 0) os << "negative queue, class " << i + 1 << "; ";
    for (std::size_t j = 0; j < sys.stations(); ++j) {
      if (s.Psi(i, j) < 0) os << "negative Psi; ";
      if (!sys.is_activity(i, j) && s.Psi(i, j) != 0) os << "service on a non-activity; ";
    }
  }
  for (std::size_t j = 0; j < sys.stations(); ++j)
    if (s.idle(sys, j) < 0) os << "negative idle count, pool " << j + 1 << "; ";
  const std::string msg = os.str();
  if (!msg.empty()) {
    if (log.violations == 0) log.first_violation = "event " + std::to_string(event) + ": " + msg;
    ++log.violations;
  }
}

}  // namespace detail

/// Event-driven simulation on [0, T]: Poisson arrivals at rate lambda^n_i and
/// exponential services, activity (i,j) completing at aggregate rate
/// mu_ij * Psi_ij. The occupancy indicator is piecewise constant between
/// events, so its integral is exact. Throws PolicyViolation on an
/// inadmissible assignment.
inline SimResult simulate(const SystemInstance& sys, const Policy& policy, const SimOptions& opt,
                          std::uint64_t seed, std::size_t rep = 0) {
  const std::size_t I = sys.classes(), J = sys.stations();
  if (!(opt.T > 0.0)) throw Error("simulation horizon T must be positive");
  std::mt19937_64 rng(seed);

  SimResult res;
  res.n = sys.n;
  res.rep = rep;
  res.seed = seed;
  res.policy = policy.name();
  res.heuristic_policy = policy.heuristic();
  res.T = opt.T;
  res.warmup = opt.warmup;
  res.arrivals.assign(I, 0);
  res.completions = CountMatrix(I, J);
  res.x0 = sys.x0;

  SystemState s;
  s.X = sys.x0;
  // Start from the fluid split, clipped to what the head counts and pools allow.
  s.Psi = CountMatrix(I, J);
  {
    std::vector<long long> row_left = s.X, col_left = sys.N;
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j) {
        const long long v = std::min({sys.psi0(i, j), row_left[i], col_left[j]});
        s.Psi(i, j) = std::max(v, 0LL);
        row_left[i] -= s.Psi(i, j);
        col_left[j] -= s.Psi(i, j);
      }
  }
  const long long servers = sys.total_servers();

  auto apply_policy = [&](std::size_t event) {
    CountMatrix next = s.Psi;
    policy.assign(s, sys, next);
    if (next.rows() != I || next.cols() != J)
      throw PolicyViolation("policy " + policy.name() + " returned a matrix of the wrong shape at event " +
                            std::to_string(event));
    const std::string bad = check_assignment(next, s.X, sys);
    if (!bad.empty())
      throw PolicyViolation("policy " + policy.name() + " at event " + std::to_string(event) + ": " + bad);
    s.Psi = std::move(next);
    if (opt.check_conservation)
      detail::audit_state(s, sys, res.x0, res.arrivals, res.completions, event, res.conservation);
  };
  apply_policy(0);

  const std::size_t n_samples = opt.sample_points;
  const double sample_dt = n_samples > 1 ? opt.T / static_cast<double>(n_samples - 1) : opt.T;
  std::size_t next_sample = 0;
  auto record_until = [&](double t_end, double occ_at_t, bool busy) {
    // Samples at grid times in [s.t, t_end) see the current state.
    while (next_sample < n_samples) {
      const double ts = next_sample + 1 == n_samples ? opt.T : static_cast<double>(next_sample) * sample_dt;
      if (ts >= t_end && ts < opt.T) break;
      if (ts > t_end) break;
      const double running = occ_at_t + (busy ? ts - s.t : 0.0);
      res.samples.push_back({ts, s.X, s.Psi, running});
      ++next_sample;
    }
  };

  std::vector<double> rates(I + I * J);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t event = 0;
  for (;;) {
    double total = 0.0;
    for (std::size_t i = 0; i < I; ++i) total += (rates[i] = sys.lambda_n[i]);
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j)
        total += (rates[I + i * J + j] = sys.mu(i, j) * static_cast<double>(s.Psi(i, j)));
    const double t_next = s.t + unit_exp(rng) / total;
    const double t_stop = std::min(t_next, opt.T);

    const bool busy = s.total_customers() >= servers;
    if (t_stop < opt.T) record_until(t_stop, res.queue_occupancy, busy);
    if (busy) {
      res.queue_occupancy += t_stop - s.t;
      const double from = std::max(s.t, opt.warmup);
      if (t_stop > from) res.window_occupancy += t_stop - from;
    }
    if (t_next >= opt.T) {
      // Remaining grid points, including T itself, see the final state.
      const double occ_before = res.queue_occupancy - (busy ? opt.T - s.t : 0.0);
      record_until(opt.T, occ_before, busy);
      s.t = opt.T;
      break;
    }
    s.t = t_next;

    // Pick the event proportionally to its rate.
    double u = unit(rng) * total;
    std::size_t k = 0;
    for (; k + 1 < rates.size(); ++k) {
      if (u < rates[k]) break;
      u -= rates[k];
    }
    while (rates[k] <= 0.0) --k;  // guard against round-off landing on a zero rate
    ++event;
    if (k < I) {
      ++s.X[k];
      ++res.arrivals[k];
    } else {
      const std::size_t i = (k - I) / J, j = (k - I) % J;
      --s.X[i];
      --s.Psi(i, j);
      ++res.completions(i, j);
    }
    apply_policy(event);
  }
  res.events = event;
  res.final_X = s.X;
  return res;
}

/// Diffusion-scaled view of one sample: centered at the fluid solution and
/// divided by sqrt(n).
struct ScaledSample {
  double t = 0.0;
  std::vector<double> X_hat;
  RealMatrix Psi_hat;
  std::vector<double> N_hat;
  std::vector<double> Y_hat;  // scaled queue lengths
  std::vector<double> Z_hat;  // scaled idle servers
};

inline std::vector<ScaledSample> scale_result(const SimResult& res, const SystemInstance& sys) {
  const std::size_t I = sys.classes(), J = sys.stations();
  const double dn = static_cast<double>(sys.n);
  const double root = std::sqrt(dn);
  std::vector<double> N_hat(J);
  for (std::size_t j = 0; j < J; ++j) N_hat[j] = (static_cast<double>(sys.N[j]) - dn * sys.nu[j]) / root;
  std::vector<ScaledSample> out;
  out.reserve(res.samples.size());
  for (const auto& smp : res.samples) {
    ScaledSample sc{smp.t, std::vector<double>(I), RealMatrix(I, J), N_hat, std::vector<double>(I),
                    std::vector<double>(J)};
    for (std::size_t i = 0; i < I; ++i) {
      sc.X_hat[i] = (static_cast<double>(smp.X[i]) - dn * sys.x_star[i]) / root;
      double served = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        sc.Psi_hat(i, j) = (static_cast<double>(smp.Psi(i, j)) - dn * sys.psi_star(i, j)) / root;
        served += sc.Psi_hat(i, j);
      }
      sc.Y_hat[i] = sc.X_hat[i] - served;
    }
    for (std::size_t j = 0; j < J; ++j) {
      double busy = 0.0;
      for (std::size_t i = 0; i < I; ++i) busy += sc.Psi_hat(i, j);
      sc.Z_hat[j] = N_hat[j] - busy;
    }
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace pqnet

#endif  // PQNET_SIMULATOR_HPP
