#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "srp/cli.hpp"

using namespace srp;
using namespace srp::cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("srp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = temp_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(SRP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario_file(const std::string& name, Index n) {
  std::ostringstream out, err;
  const std::string path = (temp_dir() / (name + "_" + std::to_string(n) + ".json")).string();
  REQUIRE(cmd_scenario({name, n, path}, out, err) == kSolved);
  return path;
}

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorCode::no_solution) == kNoSolution);
  CHECK(exit_code_for(ErrorCode::negative_discriminant) == kNoSolution);
  CHECK(exit_code_for(ErrorCode::no_root_in_delta) == kNoSolution);
  CHECK(exit_code_for(ErrorCode::invalid_instance) == kInvalidInstance);
  CHECK(exit_code_for(ErrorCode::pivot_too_small) == kInvalidInstance);
  CHECK(exit_code_for(ErrorCode::not_spanning) == kInvalidInstance);
  CHECK(exit_code_for(ErrorCode::series_undetermined) == kUnresolved);
  CHECK(exit_code_for(ErrorCode::not_converging) == kUnresolved);
}

TEST_CASE("solve writes a JSON report") {
  const std::string input = scenario_file("ellipsoid_dual", 64);
  std::ostringstream out, err;
  SolveArgs args;
  args.input = input;
  REQUIRE(cmd_solve(args, out, err) == kSolved);
  const Json doc = Json::parse(out.str());
  CHECK(doc["case"] == "case1b");
  CHECK(doc["solutions"].size() == 2);
  CHECK(doc["diagnostics"]["uniqueness"]["a_dual_exists"] == true);

  args.output = (temp_dir() / "report.json").string();
  std::ostringstream out2;
  REQUIRE(cmd_solve(args, out2, err) == kSolved);
  CHECK(out2.str().find("2 solution(s)") != std::string::npos);
  const SolutionReport rep = report_from_json(Json::parse(read_file(args.output)));
  CHECK(rep.solutions.size() == 2);
}

TEST_CASE("solve exit codes") {
  std::ostringstream out, err;
  SolveArgs args;
  args.input = write_temp("bad.json", R"({"geometry": "euclidean", "sensors": [[0], [1]], "times": [0, "x"]})");
  CHECK(cmd_solve(args, out, err) == kInvalidInstance);
  CHECK(err.str().find("times[1]") != std::string::npos);

  args.input = write_temp("flat.json", R"({"geometry": "euclidean", "sensors": [[0, 0], [1, 0]], "times": [0, 1]})");
  CHECK(cmd_solve(args, out, err) == kInvalidInstance);

  args.input = write_temp("nosol.json",
                          R"({"geometry": "euclidean", "sensors": [[0, 0], [1, 0], [0, 1]], "times": [0, 5, 0.5]})");
  CHECK(cmd_solve(args, out, err) == kNoSolution);

  args.input = (temp_dir() / "does_not_exist.json").string();
  CHECK(cmd_solve(args, out, err) == kInvalidInstance);
}

TEST_CASE("retry by doubling the truncation") {
  const std::string input = scenario_file("two_solutions", 16);
  SolveArgs args;
  args.input = input;
  args.retry_doubling = 0;
  std::ostringstream out, err;
  CHECK(cmd_solve(args, out, err) == kUnresolved);

  args.retry_doubling = 3;
  std::ostringstream out2, err2;
  REQUIRE(cmd_solve(args, out2, err2) == kSolved);
  CHECK(err2.str().find("retrying at truncation 32") != std::string::npos);
  const Json doc = Json::parse(out2.str());
  CHECK(doc["truncation"] == 32);
  CHECK(doc["solutions"].size() == 2);
}

TEST_CASE("tolerance from the environment") {
  const std::string input = scenario_file("two_solutions", 256);
  CHECK(resolve_tolerances(std::nullopt).resid == Tolerances{}.resid);
  CHECK(resolve_tolerances(1e-6).resid == 1e-6);
  ::setenv("SRP_DEFAULT_TOL", "1e-20", 1);
  CHECK(resolve_tolerances(std::nullopt).resid == 1e-20);
  SolveArgs args;
  args.input = input;
  std::ostringstream out, err;
  CHECK(cmd_solve(args, out, err) == kNoSolution);
  args.tol = 1e-9;
  CHECK(cmd_solve(args, out, err) == kSolved);
  ::unsetenv("SRP_DEFAULT_TOL");
}

TEST_CASE("simulate then solve") {
  const std::string sensors = write_temp("sensors.json", R"({"sensors": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]})");
  SimulateArgs sim;
  sim.sensors_file = sensors;
  sim.source = {0.3, -0.2, 0.5};
  sim.emission = -1.0;
  sim.output = (temp_dir() / "simulated.json").string();
  std::ostringstream out, err;
  REQUIRE(cmd_simulate(sim, out, err) == kSolved);
  const InstanceFile f = read_instance_file(sim.output);
  CHECK(f.instance.size() == 4);
  REQUIRE(f.ground_truth);

  SolveArgs args;
  args.input = sim.output;
  std::ostringstream sout;
  REQUIRE(cmd_solve(args, sout, err) == kSolved);
  const Json doc = Json::parse(sout.str());
  bool found = false;
  for (const auto& s : doc["solutions"]) {
    found = found || std::abs(s["t"].get<double>() + 1.0) <= 1e-9;
  }
  CHECK(found);

  SimulateArgs sc;
  sc.scenario = "orthonormal_basis";
  sc.truncate = 32;
  std::ostringstream sc_out;
  REQUIRE(cmd_simulate(sc, sc_out, err) == kSolved);
  CHECK(parse_instance(sc_out.str()).instance.truncation() == 32);
}

TEST_CASE("diagnose") {
  DiagnoseArgs args;
  args.input = scenario_file("orthonormal_basis", 128);
  std::ostringstream out, err;
  REQUIRE(cmd_diagnose(args, out, err) == kSolved);
  const Json doc = Json::parse(out.str());
  CHECK(doc["case"] == "case1a");
  CHECK(doc["uniqueness"]["c_orthogonal_subsequence"] == true);
  CHECK(doc["solution_count"] == 1);
}

TEST_CASE("galerkin table") {
  GalerkinArgs args;
  args.input = scenario_file("two_solutions", 256);
  args.max_n = 16;
  args.output = (temp_dir() / "galerkin.json").string();
  std::ostringstream out, err;
  REQUIRE(cmd_galerkin(args, out, err) == kSolved);
  CHECK(out.str().find("t_n") != std::string::npos);
  const Json doc = Json::parse(read_file(args.output));
  CHECK(doc["galerkin"]["rows"].size() == 16);

  args.max_n = 1000;
  CHECK(cmd_galerkin(args, out, err) == kInvalidInstance);
  args.max_n = 4;
  args.input = scenario_file("sphere_orthonormal", 16);
  CHECK(cmd_galerkin(args, out, err) == kInvalidInstance);
}

TEST_CASE("scenario listing") {
  std::ostringstream out, err;
  REQUIRE(cmd_scenario({}, out, err) == kSolved);
  for (const auto& name : scenario_names()) CHECK(out.str().find(name) != std::string::npos);
  std::ostringstream one;
  REQUIRE(cmd_scenario({"ellipsoid_dual", 8, ""}, one, err) == kSolved);
  const InstanceFile f = parse_instance(one.str());
  CHECK(f.instance.truncation() == 8);
  CHECK(cmd_scenario({"nope", 8, ""}, one, err) != kSolved);
}

TEST_CASE("binary exit codes") {
  const std::string ok = scenario_file("ellipsoid_dual", 32);
  CHECK(run_binary("solve --input " + ok) == 0);
  CHECK(run_binary("") == 1);
  CHECK(run_binary("solve") == 1);
  CHECK(run_binary("solve --input " + ok + " --tol notanumber") == 1);
  CHECK(run_binary("solve --input " + (temp_dir() / "missing.json").string()) == 3);
  CHECK(run_binary("solve --input " + scenario_file("two_solutions", 16) + " --retry-doubling 0") == 4);
  const std::string nosol = write_temp(
      "nosol_bin.json", R"({"geometry": "euclidean", "sensors": [[0, 0], [1, 0], [0, 1]], "times": [0, 5, 0.5]})");
  CHECK(run_binary("solve --input " + nosol) == 2);
  CHECK(run_binary("scenario") == 0);
  CHECK(run_binary("galerkin --input " + ok + " --max-n 8") == 0);
  CHECK(run_binary("diagnose --input " + ok) == 0);
  CHECK(run_binary("simulate --scenario two_solutions --truncate 8") == 0);
}
