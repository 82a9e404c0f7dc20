#include "srp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace srp::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::series_undetermined:
    case ErrorCode::not_converging:
      return kUnresolved;
    case ErrorCode::negative_discriminant:
    case ErrorCode::mixed:
    case ErrorCode::no_solution:
    case ErrorCode::empty_delta:
    case ErrorCode::empty_intersection:
    case ErrorCode::no_root_in_delta:
      return kNoSolution;
    default:
      return kInvalidInstance;
  }
}

Tolerances resolve_tolerances(std::optional<double> tol) {
  Tolerances t;
  if (tol) {
    t.resid = *tol;
  } else if (const char* env = std::getenv("SRP_DEFAULT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0) t.resid = v;
  }
  return t;
}

namespace {

int report_error(const SrpError& e, std::ostream& err) {
  err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
  return exit_code_for(e.code());
}

void emit(const Json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream file(path);
  if (!file) throw SrpError(ErrorCode::invalid_instance, path + ": cannot open for writing");
  file << doc.dump(2) << "\n";
}

bool retryable(ErrorCode code) {
  return code == ErrorCode::series_undetermined || code == ErrorCode::not_converging;
}

struct Solved {
  SolutionReport report;
  Index truncation = 0;
};

Solved run_solver(const InstanceFile& file, const Tolerances& tol, Index anchor) {
  Solved s;
  s.truncation = file.instance.truncation();
  if (file.instance.geometry == Geometry::sphere) {
    s.report = make_report(solve_sphere(file.instance, tol));
  } else {
    EuclidOptions opts;
    opts.tol = tol;
    opts.anchor = anchor;
    const EuclidResult res = solve_euclidean(file.instance, opts);
    s.report = make_report(res, diagnose_uniqueness(res.setup, res.solutions, tol));
  }
  return s;
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  try {
    InstanceFile file = read_instance_file(args.input);
    if (args.truncate) file = with_truncation(file, *args.truncate);
    const Tolerances tol = resolve_tolerances(args.tol);
    for (int attempt = 0;; ++attempt) {
      try {
        const Solved solved = run_solver(file, tol, args.anchor);
        emit(report_to_json(solved.report), args.output, out);
        if (!args.output.empty()) {
          out << solved.report.solutions.size() << " solution(s), case " << solved.report.case_label
              << ", truncation " << solved.truncation << "\n";
        }
        return solved.report.solutions.empty() ? kNoSolution : kSolved;
      } catch (const SrpError& e) {
        if (!retryable(e.code()) || !file.scenario || attempt >= args.retry_doubling) throw;
        const Index next = 2 * file.instance.truncation();
        err << "note: " << e.what() << "; retrying at truncation " << next << "\n";
        file = with_truncation(file, next);
      }
    }
  } catch (const SrpError& e) {
    return report_error(e, err);
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    InstanceFile file;
    if (!args.scenario.empty()) {
      Scenario sc = generate(args.scenario, args.truncate.value_or(kDefaultTruncation));
      file.instance = std::move(sc.instance);
      file.ground_truth = std::move(sc.ground_truth);
    } else {
      if (args.sensors_file.empty()) {
        err << "error: give --scenario or --sensors-file\n";
        return kUsage;
      }
      std::ifstream in(args.sensors_file);
      if (!in) throw SrpError(ErrorCode::invalid_instance, args.sensors_file + ": cannot open file");
      std::stringstream buf;
      buf << in.rdbuf();
      Json doc;
      try {
        doc = Json::parse(buf.str());
      } catch (const Json::parse_error& e) {
        throw SrpError(ErrorCode::invalid_instance, args.sensors_file + ": malformed JSON (" + e.what() + ")");
      }
      if (doc.is_array()) doc = Json{{"geometry", "euclidean"}, {"sensors", doc}};
      if (doc.is_object() && !doc.contains("geometry")) doc["geometry"] = "euclidean";
      if (doc.is_object() && doc.contains("sensors") && doc["sensors"].is_array() && !doc.contains("times")) {
        doc["times"] = std::vector<double>(doc["sensors"].size(), 0.0);
      }
      doc.erase("ground_truth");
      file = parse_instance(doc);
      file.scenario.reset();
      if (args.truncate) file = with_truncation(file, *args.truncate);
      const Index n = file.instance.truncation();
      if (static_cast<Index>(args.source.size()) > n) {
        throw SrpError(ErrorCode::invalid_instance, "source: more coordinates than the truncation");
      }
      Point s = Point::Zero(n);
      for (std::size_t j = 0; j < args.source.size(); ++j) s(static_cast<Index>(j)) = args.source[j];
      file.instance.times =
          forward_simulate(file.instance.sensors, s, args.emission, file.instance.geometry, resolve_tolerances({}));
      file.ground_truth = GroundTruth{s, args.emission};
    }
    emit(instance_to_json(file), args.output, out);
    return kSolved;
  } catch (const SrpError& e) {
    return report_error(e, err);
  }
}

int cmd_diagnose(const DiagnoseArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const InstanceFile file = read_instance_file(args.input);
    const Tolerances tol = resolve_tolerances(args.tol);
    const Solved solved = run_solver(file, tol, 0);
    Json doc = solved.report.diagnostics;
    doc["geometry"] = file.instance.geometry == Geometry::sphere ? "sphere" : "euclidean";
    doc["truncation"] = solved.truncation;
    doc["case"] = solved.report.case_label;
    doc["solution_count"] = solved.report.solutions.size();
    emit(doc, args.output, out);
    return kSolved;
  } catch (const SrpError& e) {
    return report_error(e, err);
  }
}

int cmd_galerkin(const GalerkinArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const InstanceFile file = read_instance_file(args.input);
    if (file.instance.geometry != Geometry::euclidean) {
      throw SrpError(ErrorCode::invalid_instance, "SRP_n sequences are defined for euclidean instances only");
    }
    EuclidOptions opts;
    opts.tol = resolve_tolerances(args.tol);
    const EuclidResult res = solve_euclidean(file.instance, opts);
    const Index m = res.setup.frame.rank();
    if (args.max_n < 1 || args.max_n > m) {
      throw SrpError(ErrorCode::invalid_instance, "--max-n " + std::to_string(args.max_n) +
                                                      " exceeds the number of non-anchor sensors (" +
                                                      std::to_string(m) + ")");
    }
    double hint = res.sources().empty() ? 0.0 : res.sources().front()->t;
    try {
      hint = solve_srp_n(res.setup, args.max_n, opts.tol).t_n;
    } catch (const SrpError&) {
    }
    const EmissionSolution* ref = closest_source(res, hint);
    if (!ref) {
      err << "error: no source solution to compare against\n";
      return kNoSolution;
    }
    const GalerkinSequence seq = galerkin_sequence(res.setup, args.max_n, *ref, res.sources().size() == 1, opts.tol);

    out << "t_inf = " << std::setprecision(17) << seq.t_reference << "\n";
    out << std::setw(6) << "n" << std::setw(26) << "t_n" << std::setw(14) << "|dt|" << std::setw(14) << "|ds|"
        << std::setw(14) << "|ds| (id)" << "\n";
    for (const auto& row : seq.rows) {
      out << std::setw(6) << row.n;
      if (row.result) {
        out << std::setw(26) << std::setprecision(17) << row.result->t_n << std::setprecision(4)
            << std::scientific << std::setw(14) << row.t_error << std::setw(14) << row.s_error << std::setw(14)
            << row.s_error_identity << std::defaultfloat << "\n";
      } else {
        out << "  " << row.error << "\n";
      }
    }
    if (!seq.hypotheses.hold()) out << "note: convergence hypotheses not all satisfied\n";
    if (!args.output.empty()) {
      SolutionReport rep = make_report(res, diagnose_uniqueness(res.setup, res.solutions, opts.tol));
      rep.galerkin = galerkin_to_json(seq);
      emit(report_to_json(rep), args.output, out);
    }
    return kSolved;
  } catch (const SrpError& e) {
    return report_error(e, err);
  }
}

int cmd_scenario(const ScenarioArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.name.empty()) {
      for (const auto& name : scenario_names()) out << name << "\n";
      return kSolved;
    }
    const Scenario sc = generate(args.name, args.truncate);
    Json doc = {{"geometry", sc.instance.geometry == Geometry::sphere ? "sphere" : "euclidean"},
                {"scenario", {{"name", sc.name}, {"truncation", args.truncate}}}};
    emit(doc, args.output, out);
    return kSolved;
  } catch (const SrpError& e) {
    return report_error(e, err);
  }
}

}  // namespace srp::cli
