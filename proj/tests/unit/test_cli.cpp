#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PQNET_CLI_PATH;
const fs::path kScratch = PQNET_SCRATCH_DIR;
const std::string kModels = PQNET_MODELS_DIR;

int run(const std::string& args) {
  fs::create_directories(kScratch);
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + (kScratch / "stdout.txt").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string output() { return slurp(kScratch / "stdout.txt"); }

// Key set and value types, with arrays reduced to their first element.
json skeleton(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : j.items()) out[k] = skeleton(v);
    return out;
  }
  if (j.is_array()) return j.empty() ? json::array() : json::array({skeleton(j.front())});
  if (j.is_number()) return "number";
  return j.type_name();
}

}  // namespace

TEST_CASE("analyze prints the verdict") {
  CHECK(run("analyze \"" + kModels + "/case_a.json\"") == 0);
  CHECK(output().find("throughput sub-optimal; NC possible") != std::string::npos);
  CHECK(run("analyze \"" + kModels + "/minimal_1x1.json\" --strict") == 0);
  CHECK(output().find("NC impossible") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("analyze \"" + kModels + "/does_not_exist.json\"") == 2);
  {
    std::ofstream bad(kScratch / "bad.json");
    bad << "{\"classes\": 1, \"stations\": 1, \"lambda\": [1], \"nu\": [1], \"mu\": [[-1]]}";
  }
  CHECK(run("analyze \"" + (kScratch / "bad.json").string() + "\"") == 2);
  {
    std::ofstream light(kScratch / "light.json");
    light << "{\"classes\": 1, \"stations\": 1, \"lambda\": [0.5], \"nu\": [1], \"mu\": [[1]]}";
  }
  CHECK(run("analyze \"" + (kScratch / "light.json").string() + "\"") == 0);
  CHECK(run("analyze \"" + (kScratch / "light.json").string() + "\" --strict") == 3);
  CHECK(run("simulate \"" + (kScratch / "light.json").string() + "\" --n 4 --out \"" +
            (kScratch / "sim_light").string() + "\"") == 3);
  CHECK(run("simulate \"" + kModels + "/zero_path_2x2.json\" --n 4 --policy negative-path --out \"" +
            (kScratch / "sim_np").string() + "\"") == 4);
  CHECK(run("simulate \"" + kModels + "/case_a.json\" --n 4 --policy no-such-policy") != 0);
  CHECK(run("frobnicate") != 0);
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  const auto a = kScratch / "rep_a", b = kScratch / "rep_b";
  const std::string common = "simulate \"" + kModels + "/case_a.json\" --n 4,16 --T 1 --reps 1 --seed 42 --out ";
  REQUIRE(run(common + "\"" + a.string() + "\"") == 0);
  REQUIRE(run(common + "\"" + b.string() + "\"") == 0);
  CHECK(slurp(a / "trajectories.csv") == slurp(b / "trajectories.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));

  std::istringstream csv(slurp(a / "trajectories.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "n,rep,t,X_1,X_2,Psi_1_3,Psi_1_4,Psi_1_5,Psi_2_3,Psi_2_4,Psi_2_5,occupancy_running");
  const auto summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["policy"] == "greedy-basic");
  CHECK(summary["conservation_ok"] == true);
  CHECK(summary["rows"].size() == 2);
}

TEST_CASE("generate then analyze") {
  const auto model = kScratch / "gen.json";
  REQUIRE(run("generate --I 2 --J 3 --seed 9 --out \"" + model.string() + "\"") == 0);
  CHECK(fs::exists(model));
  REQUIRE(run("analyze \"" + model.string() + "\" --strict --json \"" + (kScratch / "gen_report.json").string() +
              "\"") == 0);
  const auto report = json::parse(slurp(kScratch / "gen_report.json"));
  CHECK(report["assumptions"]["is_tree"] == true);
  CHECK(report["defects"].empty());

  REQUIRE(run("generate --I 2 --J 2 --seed 3 --integer-rates --zero-path --out \"" + model.string() + "\"") == 0);
  REQUIRE(run("analyze \"" + model.string() + "\" --json \"" + (kScratch / "gen_report.json").string() + "\"") == 0);
  const auto zero = json::parse(slurp(kScratch / "gen_report.json"));
  bool has_zero = false;
  for (const auto& p : zero["paths"]) has_zero = has_zero || p["sign_class"] == "zero";
  CHECK(has_zero);
  CHECK(zero["nc_verdict"]["status"] == "impossible");
}

TEST_CASE("JSON report layout matches the reference skeleton") {
  const auto out = kScratch / "case_a_report.json";
  REQUIRE(run("analyze \"" + kModels + "/case_a.json\" --json \"" + out.string() + "\"") == 0);
  const auto got = skeleton(json::parse(slurp(out)));
  const auto want = json::parse(slurp(fs::path(PQNET_TEST_DATA_DIR) / "case_a_report_skeleton.json"));
  CHECK(got == want);
}
