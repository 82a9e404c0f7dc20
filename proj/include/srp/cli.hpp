#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srp/io.hpp"

namespace srp::cli {

/// Process exit codes.
enum ExitCode : int {
  kSolved = 0,
  kUsage = 1,
  kNoSolution = 2,
  kInvalidInstance = 3,
  kUnresolved = 4,
};

int exit_code_for(ErrorCode code);

/// Tolerances with resid taken from --tol, else from SRP_DEFAULT_TOL, else the default.
Tolerances resolve_tolerances(std::optional<double> tol);

struct SolveArgs {
  std::string input;
  std::optional<double> tol;
  std::optional<Index> truncate;
  std::string output;  // empty: report on stdout
  int retry_doubling = 3;
  Index anchor = 0;
};

struct SimulateArgs {
  std::string scenario;
  std::string sensors_file;
  std::vector<double> source;
  double emission = 0.0;
  std::optional<Index> truncate;
  std::string output;
};

struct DiagnoseArgs {
  std::string input;
  std::optional<double> tol;
  std::string output;
};

struct GalerkinArgs {
  std::string input;
  Index max_n = 64;
  std::optional<double> tol;
  std::string output;
};

struct ScenarioArgs {
  std::string name;  // empty: list names
  Index truncate = kDefaultTruncation;
  std::string output;
};

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_diagnose(const DiagnoseArgs& args, std::ostream& out, std::ostream& err);
int cmd_galerkin(const GalerkinArgs& args, std::ostream& out, std::ostream& err);
int cmd_scenario(const ScenarioArgs& args, std::ostream& out, std::ostream& err);

}  // namespace srp::cli
