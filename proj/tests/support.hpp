#pragma once

#include <random>

#include "srp/scenarios.hpp"
#include "srp/sphere_solver.hpp"

namespace srp::testing {

inline Point random_gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Point p(n);
  for (Index j = 0; j < n; ++j) p(j) = g(rng);
  return p;
}

inline Point random_unit(std::mt19937_64& rng, Index n) {
  Point p = random_gaussian(rng, n);
  return p / p.norm();
}

inline Index random_dim(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Finite Euclidean instance: anchor plus `dim` generic sensors, times from
/// a random source.
struct Simulated {
  SrpInstance instance;
  GroundTruth truth;
};

inline Simulated random_euclidean(std::mt19937_64& rng, Index dim, Index extra_sensors = 0) {
  Eigen::MatrixXd rows(dim + 1 + extra_sensors, dim);
  for (Index i = 0; i < rows.rows(); ++i) rows.row(i) = random_gaussian(rng, dim).transpose();
  Simulated out;
  out.instance.sensors = make_sensor_rows(rows);
  out.truth.s = random_gaussian(rng, dim);
  out.truth.t = uniform(rng, -2.0, 2.0);
  out.instance.times = forward_simulate(out.instance.sensors, out.truth.s, out.truth.t, Geometry::euclidean);
  return out;
}

inline Simulated random_sphere(std::mt19937_64& rng, Index dim) {
  Eigen::MatrixXd rows(dim, dim);
  for (Index i = 0; i < dim; ++i) rows.row(i) = random_unit(rng, dim).transpose();
  Simulated out;
  out.instance.geometry = Geometry::sphere;
  out.instance.sensors = make_sensor_rows(rows);
  out.truth.s = random_unit(rng, dim);
  out.truth.t = uniform(rng, -1.0, 1.0);
  out.instance.times = forward_simulate(out.instance.sensors, out.truth.s, out.truth.t, Geometry::sphere);
  return out;
}

}  // namespace srp::testing
