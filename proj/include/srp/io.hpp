#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srp/galerkin.hpp"
#include "srp/scenarios.hpp"
#include "srp/sphere_solver.hpp"

namespace srp {

using Json = nlohmann::json;

struct ScenarioRef {
  std::string name;
  Index truncation = 0;
};

/// Instance document. Sensors are arrays of numbers, or
/// {"index": [...], "value": [...]} for sparse rows.
struct InstanceFile {
  SrpInstance instance;
  std::optional<GroundTruth> ground_truth;
  std::optional<ScenarioRef> scenario;
};

inline constexpr Index kDefaultTruncation = 1024;

/// Throws SrpError(invalid_instance) with the offending field path (or the
/// line of a syntax error) in the message; SrpError(unknown_scenario).
InstanceFile parse_instance(const std::string& text);
InstanceFile parse_instance(const Json& doc);
inline InstanceFile parse_instance(const char* text) { return parse_instance(std::string(text)); }
InstanceFile read_instance_file(const std::string& path);

/// Explicit sensors and times; the scenario reference is kept when present.
Json instance_to_json(const InstanceFile& file);
Json point_to_json(const Point& p);
Point point_from_json(const Json& value, Index n, const std::string& path);

/// Same instance at truncation n: scenarios are regenerated, explicit
/// sensors are zero padded. Throws SrpError(invalid_instance) when n is too small.
InstanceFile with_truncation(const InstanceFile& file, Index n);

struct ReportedSolution {
  std::string kind;  // source | dual
  std::string case_label;
  std::string status;  // verified | approximate
  std::string set_kind = "finite";
  double t = 0.0;
  Point s;
  double max_residual = 0.0;
  double tail_norm2 = 0.0;
};

struct SolutionReport {
  Geometry geometry = Geometry::euclidean;
  Index truncation = 0;
  std::string case_label;
  std::vector<ReportedSolution> solutions;
  Json diagnostics = Json::object();
  Json galerkin;
};

Json uniqueness_to_json(const UniquenessReport& report);
Json verdict_to_json(const ConvergenceVerdict& verdict);
Json galerkin_to_json(const GalerkinSequence& seq);

SolutionReport make_report(const EuclidResult& result, const UniquenessReport& uniqueness);
SolutionReport make_report(const SphereResult& result);

Json report_to_json(const SolutionReport& report);
SolutionReport report_from_json(const Json& doc);

/// Max residual of each reported solution recomputed against `instance`.
std::vector<double> reverify(const SolutionReport& report, const SrpInstance& instance);

}  // namespace srp
