#include <iostream>

#include <CLI11.hpp>

#include "srp/cli.hpp"

int main(int argc, char** argv) {
  using namespace srp::cli;
  CLI::App app{"Sound-ranging solver: recover source point and emission time from arrival times"};
  app.require_subcommand(1);

  SolveArgs solve;
  std::optional<double> solve_tol;
  std::optional<srp::Index> solve_n;
  auto* s = app.add_subcommand("solve", "Solve an instance file");
  s->add_option("--input", solve.input, "Instance JSON")->required();
  s->add_option("--tol", solve_tol, "Residual tolerance");
  s->add_option("--truncate", solve_n, "Working truncation N");
  s->add_option("--output", solve.output, "Report path (default: stdout)");
  s->add_option("--retry-doubling", solve.retry_doubling, "Truncation doublings on undetermined series")
      ->capture_default_str();
  s->add_option("--anchor", solve.anchor, "Anchor sensor index")->capture_default_str();

  SimulateArgs sim;
  std::optional<srp::Index> sim_n;
  auto* m = app.add_subcommand("simulate", "Forward-simulate arrival times into an instance file");
  auto* sim_scenario = m->add_option("--scenario", sim.scenario, "Scenario name");
  auto* sim_sensors = m->add_option("--sensors-file", sim.sensors_file, "JSON with a \"sensors\" array");
  sim_scenario->excludes(sim_sensors);
  m->add_option("--source", sim.source, "Source coordinates")->delimiter(',');
  m->add_option("--emission", sim.emission, "Emission time");
  m->add_option("--truncate", sim_n, "Working truncation N");
  m->add_option("--output", sim.output, "Output path (default: stdout)");

  DiagnoseArgs diag;
  std::optional<double> diag_tol;
  auto* d = app.add_subcommand("diagnose", "Uniqueness findings and series verdicts");
  d->add_option("--input", diag.input, "Instance JSON")->required();
  d->add_option("--tol", diag_tol, "Residual tolerance");
  d->add_option("--output", diag.output, "Output path (default: stdout)");

  GalerkinArgs gal;
  std::optional<double> gal_tol;
  auto* g = app.add_subcommand("galerkin", "Convergence table of the downdimensioned problems");
  g->add_option("--input", gal.input, "Instance JSON")->required();
  g->add_option("--max-n", gal.max_n, "Largest n")->capture_default_str();
  g->add_option("--tol", gal_tol, "Residual tolerance");
  g->add_option("--output", gal.output, "JSON report path");

  ScenarioArgs sc;
  auto* c = app.add_subcommand("scenario", "List scenarios, or emit a scenario reference file");
  c->add_option("name", sc.name, "Scenario name");
  c->add_option("--truncate", sc.truncate, "Truncation N")->capture_default_str();
  c->add_option("--output", sc.output, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (*s) {
    solve.tol = solve_tol;
    solve.truncate = solve_n;
    return cmd_solve(solve, std::cout, std::cerr);
  }
  if (*m) {
    sim.truncate = sim_n;
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (*d) {
    diag.tol = diag_tol;
    return cmd_diagnose(diag, std::cout, std::cerr);
  }
  if (*g) {
    gal.tol = gal_tol;
    return cmd_galerkin(gal, std::cout, std::cerr);
  }
  return cmd_scenario(sc, std::cout, std::cerr);
}
