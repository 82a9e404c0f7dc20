#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srp/euclid_solver.hpp"

namespace srp {

/// Arrival times t_i = t_e + d(r^(i), s) under the geometry's metric.
/// Throws SrpError(not_on_sphere) for off-sphere points in sphere geometry.
Eigen::VectorXd forward_simulate(const SensorRows<double>& sensors, const Point& s, double t_e, Geometry geometry,
                                 const Tolerances& tol = {});

struct Scenario {
  std::string name;
  SrpInstance instance;
  std::optional<GroundTruth> ground_truth;
  std::optional<GroundTruth> dual_truth;  // time-reversed solution, when the example has one
};

/// ellipsoid_dual, two_solutions, orthonormal_basis, sphere_orthonormal.
const std::vector<std::string>& scenario_names();

/// Worked example at truncation n >= 4, times from closed forms.
/// Throws SrpError(unknown_scenario).
Scenario generate(const std::string& name, Index n);

/// Keeps the sensors whose index satisfies `keep` (the Euclidean anchor is
/// always kept) and drops coordinates no kept sensor uses, so the result
/// lives in the span of its own sensors.
SrpInstance infinite_subselect(const SrpInstance& instance, const std::function<bool(Index)>& keep);

}  // namespace srp
