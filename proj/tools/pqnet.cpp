// Command-line front end: analyze, simulate, generate.
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pqnet/pqnet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitModel = 2;
constexpr int kExitAssumptions = 3;
constexpr int kExitPolicy = 4;

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw pqnet::Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

int cmd_analyze(const std::string& model_path, const std::string& json_out, bool strict, double tol) {
  const auto model = pqnet::load_model(model_path);
  const auto a = pqnet::analyze(model, tol);
  pqnet::write_text_report(std::cout, model, a);
  if (!json_out.empty()) write_json_file(json_out, pqnet::analysis_report_json(model, a));
  if (strict && !(a.solution && a.assumptions.all_ok())) {
    std::cerr << "assumption check failed\n";
    return kExitAssumptions;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& model_path, const std::vector<long long>& n_list, double T,
                 std::size_t reps, const std::string& policy_name, std::uint64_t seed,
                 const std::string& out_dir, std::size_t samples) {
  const auto model = pqnet::load_model(model_path);
  const auto a = pqnet::analyze(model);
  if (!a.solution || !a.assumptions.structural_ok()) {
    std::cerr << "model does not satisfy the static fluid assumptions\n";
    for (const auto& v : a.assumptions.violations) std::cerr << "  " << v << "\n";
    return kExitAssumptions;
  }
  std::unique_ptr<pqnet::Policy> policy;
  try {
    policy = pqnet::make_policy(policy_name, model, *a.solution);
  } catch (const pqnet::PolicyNotApplicable& e) {
    std::cerr << "policy " << policy_name << " refused: " << e.what() << "\n";
    return kExitPolicy;
  }

  pqnet::ExperimentOptions opt;
  opt.T = T;
  opt.reps = reps;
  opt.seed = seed;
  opt.sample_points = samples;
  const auto table = pqnet::run_nc_experiment(model, *a.solution, *policy, n_list, opt);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "trajectories.csv");
    if (!csv) throw pqnet::Error("cannot write trajectories.csv in " + out_dir);
    pqnet::write_trajectory_csv(csv, table, model);
  }
  write_json_file((std::filesystem::path(out_dir) / "summary.json").string(), pqnet::experiment_summary_json(table));

  std::cout << "policy " << table.policy << (table.heuristic_policy ? " (heuristic)" : "") << ", T " << T
            << ", reps " << reps << ", seed " << seed << "\n";
  std::cout << std::setw(8) << "n" << std::setw(12) << "mean" << std::setw(12) << "median" << std::setw(12)
            << "q10" << std::setw(12) << "q90" << "\n";
  for (const auto& r : table.rows)
    std::cout << std::setw(8) << r.n << std::setw(12) << r.mean << std::setw(12) << r.median << std::setw(12)
              << r.q10 << std::setw(12) << r.q90 << "\n";
  if (!table.conservation_ok()) {
    std::cerr << "conservation violated\n";
    return kExitError;
  }
  return kExitOk;
}

int cmd_generate(std::size_t I, std::size_t J, std::uint64_t seed, const std::string& out, bool integer_rates,
                 bool zero_path) {
  pqnet::GeneratorOptions opt;
  opt.integer_rates = integer_rates;
  opt.plant_zero_path = zero_path;
  const auto inst = pqnet::generate_critical_instance(seed, I, J, opt);
  write_json_file(out, pqnet::to_json(inst.model));
  nlohmann::json planted{{"seed", seed},
                         {"seed_used", inst.seed_used},
                         {"xi_star", pqnet::detail::matrix_json(inst.planted.xi_star)},
                         {"x_star", inst.planted.x_star}};
  write_json_file(out + ".planted.json", planted);
  std::cout << "wrote " << out << " (seed used " << inst.seed_used << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static fluid analysis and simulation of parallel server networks"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "Solve, check assumptions, enumerate paths, decide verdicts");
  std::string model_path, json_out;
  bool strict = false;
  double tol = pqnet::kDefaultTol;
  analyze->add_option("model", model_path, "Model JSON file")->required();
  analyze->add_option("--json", json_out, "Write the JSON report here");
  analyze->add_flag("--strict", strict, "Exit 3 when an assumption fails");
  analyze->add_option("--tol", tol, "Numerical tolerance")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run occupancy experiments");
  std::string sim_model, policy = "greedy-basic", out_dir = ".";
  std::vector<long long> n_list;
  double T = 1.0;
  std::size_t reps = 1, samples = 11;
  std::uint64_t seed = 0;
  simulate->add_option("model", sim_model, "Model JSON file")->required();
  simulate->add_option("--n", n_list, "Scale parameters, ascending")->delimiter(',')->required();
  simulate->add_option("--T", T, "Horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--reps", reps, "Replications per n")->check(CLI::PositiveNumber);
  simulate->add_option("--policy", policy, "Scheduling policy")
      ->check(CLI::IsMember(pqnet::policy_names()));
  simulate->add_option("--seed", seed, "Base seed");
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--samples", samples, "Trajectory grid points per replication");

  auto* generate = app.add_subcommand("generate", "Write a random critically loaded model");
  std::size_t gI = 1, gJ = 1;
  std::uint64_t gseed = 0;
  std::string gout;
  bool integer_rates = false, zero_path = false;
  generate->add_option("--I", gI, "Number of classes")->required()->check(CLI::PositiveNumber);
  generate->add_option("--J", gJ, "Number of stations")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gseed, "Seed");
  generate->add_option("--out", gout, "Output model file")->required();
  generate->add_flag("--integer-rates", integer_rates, "Draw rates from 1..10");
  generate->add_flag("--zero-path", zero_path, "Plant a zero-weight simple path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(model_path, json_out, strict, tol);
    if (*simulate) return cmd_simulate(sim_model, n_list, T, reps, policy, seed, out_dir, samples);
    if (*generate) return cmd_generate(gI, gJ, gseed, gout, integer_rates, zero_path);
  } catch (const pqnet::ModelParseError& e) {
    std::cerr << "model parse error: " << e.what() << "\n";
    return kExitModel;
  } catch (const pqnet::ModelError& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kExitModel;
  } catch (const pqnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
