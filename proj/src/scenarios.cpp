#include "srp/scenarios.hpp"

#include <cmath>

#include "srp/sphere_solver.hpp"

namespace srp {

Eigen::VectorXd forward_simulate(const SensorRows<double>& sensors, const Point& s, double t_e, Geometry geometry,
                                 const Tolerances& tol) {
  Point padded = Point::Zero(sensors.cols());
  const Index n = std::min(padded.size(), s.size());
  padded.head(n) = s.head(n);
  if (geometry == Geometry::euclidean) {
    const DistanceEvaluator eval(sensors, padded);
    return (eval.distances().array() + t_e).matrix();
  }
  if (std::abs(padded.norm() - 1.0) > tol.unit) {
    throw SrpError(ErrorCode::not_on_sphere, "source is not a unit vector");
  }
  for (Index i = 0; i < sensors.rows(); ++i) {
    if (std::abs(sensors.row(i).norm() - 1.0) > tol.unit) {
      throw SrpError(ErrorCode::not_on_sphere, "sensors[" + std::to_string(i) + "] is not a unit vector", {i});
    }
  }
  SrpInstance probe;
  probe.geometry = Geometry::sphere;
  probe.sensors = sensors;
  probe.times = Eigen::VectorXd::Zero(sensors.rows());
  // residual |0 - t - d| at t = 0 is the distance itself
  return (sphere_residuals(probe, padded, 0.0).array() + t_e).matrix();
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"ellipsoid_dual", "two_solutions", "orthonormal_basis",
                                              "sphere_orthonormal"};
  return names;
}

namespace {

SensorRows<double> rows_from(Index count, Index n, const std::vector<Eigen::Triplet<double>>& entries) {
  SensorRows<double> rows(count, n);
  rows.setFromTriplets(entries.begin(), entries.end());
  rows.makeCompressed();
  return rows;
}

}  // namespace

Scenario generate(const std::string& name, Index n) {
  if (n < 4) throw SrpError(ErrorCode::invalid_instance, "scenario truncation must be at least 4", {n});
  const double sqrt2 = std::sqrt(2.0);
  Scenario sc;
  sc.name = name;
  SrpInstance& inst = sc.instance;
  inst.model = SeriesModel::truncated;
  std::vector<Eigen::Triplet<double>> entries;

  if (name == "ellipsoid_dual") {
    // r0 = -sqrt2 e_1, r1 = sqrt2 e_1, r_k = e_k; foci s' = -e_1, s'' = e_1
    entries.emplace_back(0, 0, -sqrt2);
    entries.emplace_back(1, 0, sqrt2);
    for (Index k = 2; k <= n; ++k) entries.emplace_back(k, k - 1, 1.0);
    inst.sensors = rows_from(n + 1, n, entries);
    inst.times = Eigen::VectorXd::Zero(n + 1);
    inst.times(0) = -1.0;
    inst.times(1) = 1.0;
    Point s1 = Point::Zero(n), s2 = Point::Zero(n);
    s1(0) = -1.0;
    s2(0) = 1.0;
    sc.ground_truth = GroundTruth{s1, -sqrt2};
    sc.dual_truth = GroundTruth{s2, sqrt2};
  } else if (name == "two_solutions") {
    // r_k = e_k / k, s' = -sum e_k / k, t' = -pi / sqrt6
    const double root = M_PI / std::sqrt(6.0);
    Point s = Point::Zero(n);
    inst.times = Eigen::VectorXd::Zero(n + 1);
    for (Index k = 1; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      entries.emplace_back(k, k - 1, 1.0 / kk);
      s(k - 1) = -1.0 / kk;
      inst.times(k) = 3.0 / (kk * kk * (root + std::sqrt(root * root + 3.0 / (kk * kk))));
    }
    inst.sensors = rows_from(n + 1, n, entries);
    sc.ground_truth = GroundTruth{s, -root, trigamma(static_cast<double>(n) + 1.0)};
  } else if (name == "orthonormal_basis") {
    for (Index k = 1; k <= n; ++k) entries.emplace_back(k, k - 1, 1.0);
    inst.sensors = rows_from(n + 1, n, entries);
    inst.times = Eigen::VectorXd::Constant(n + 1, sqrt2 - 1.0);
    inst.times(0) = 0.0;
    inst.times(1) = -1.0;
    Point s = Point::Zero(n);
    s(0) = 1.0;
    sc.ground_truth = GroundTruth{s, -1.0};
  } else if (name == "sphere_orthonormal") {
    inst.geometry = Geometry::sphere;
    for (Index k = 0; k < n; ++k) entries.emplace_back(k, k, 1.0);
    inst.sensors = rows_from(n, n, entries);
    inst.times = Eigen::VectorXd::Constant(n, M_PI / 2.0);
    inst.times(0) = 0.0;
    Point s = Point::Zero(n);
    s(0) = 1.0;
    sc.ground_truth = GroundTruth{s, 0.0};
  } else {
    throw SrpError(ErrorCode::unknown_scenario, "unknown scenario '" + name + "'");
  }
  return sc;
}

SrpInstance infinite_subselect(const SrpInstance& instance, const std::function<bool(Index)>& keep) {
  std::vector<Index> kept;
  for (Index i = 0; i < instance.size(); ++i) {
    if ((i == 0 && instance.geometry == Geometry::euclidean) || keep(i)) kept.push_back(i);
  }
  std::vector<Index> column(static_cast<std::size_t>(instance.truncation()), -1);
  for (Index i : kept) {
    for (SensorRows<double>::InnerIterator it(instance.sensors, i); it; ++it) {
      if (it.value() != 0.0) column[static_cast<std::size_t>(it.col())] = 0;
    }
  }
  Index used = 0;
  for (auto& c : column) {
    if (c == 0) c = used++;
  }
  if (used == 0) used = 1;

  std::vector<Eigen::Triplet<double>> entries;
  SrpInstance out;
  out.geometry = instance.geometry;
  out.model = instance.model;
  out.times.resize(static_cast<Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const Index i = kept[r];
    out.times(static_cast<Index>(r)) = instance.times(i);
    for (SensorRows<double>::InnerIterator it(instance.sensors, i); it; ++it) {
      if (it.value() != 0.0) {
        entries.emplace_back(static_cast<Index>(r), column[static_cast<std::size_t>(it.col())], it.value());
      }
    }
  }
  out.sensors = rows_from(static_cast<Index>(kept.size()), used, entries);
  return out;
}

}  // namespace srp
