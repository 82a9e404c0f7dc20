#include <doctest.h>

#include <cmath>

#include "srp/galerkin.hpp"
#include "support.hpp"

using namespace srp;

namespace {

const double kRoot = M_PI / std::sqrt(6.0);

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SrpError& e) {
    return e.code();
  }
  FAIL("expected an SrpError");
  return ErrorCode::invalid_instance;
}

}  // namespace

TEST_CASE("first downdimensioned problem of the two-solution example") {
  const EuclidSetup setup = prepare_euclidean(generate("two_solutions", 64).instance);
  const GalerkinResult r = solve_srp_n(setup, 1);
  CHECK(r.n == 1);
  CHECK(r.t_n == doctest::Approx(-0.06366946005016959023).epsilon(1e-13));
  CHECK(r.unique);
  CHECK(r.branch == GalerkinBranch::leading_negative);
  REQUIRE(r.s_frame.size() == 1);
  CHECK(r.max_residual <= 1e-12);
  const Point s = galerkin_point(setup, r);
  CHECK(s.tail(63).norm() == 0.0);
  CHECK(0.87266107989966 - r.t_n == doctest::Approx(std::abs(s(0) - 1.0)).epsilon(1e-12));
  CHECK(-r.t_n == doctest::Approx(std::abs(s(0))).epsilon(1e-12));
}

TEST_CASE("two-solution sequence converges to the reference") {
  const EuclidResult full = solve_euclidean(generate("two_solutions", 4096).instance);
  const EmissionSolution* ref = closest_source(full, -kRoot);
  REQUIRE(ref != nullptr);
  const GalerkinSequence seq = galerkin_sequence(full.setup, 64, *ref, false);
  REQUIRE(seq.rows.size() == 64);
  CHECK(seq.t_reference == doctest::Approx(-kRoot).epsilon(1e-9));
  CHECK_FALSE(seq.hypotheses.hold());
  CHECK(seq.hypotheses.c_series == SeriesVerdict::converges);

  const GalerkinRow& r8 = seq.rows[7];
  const GalerkinRow& r64 = seq.rows[63];
  REQUIRE(r8.result);
  REQUIRE(r64.result);
  CHECK(r8.result->t_n == doctest::Approx(-1.5462753970689642).epsilon(1e-9));
  CHECK(r64.result->t_n == doctest::Approx(-1.3087280822896658).epsilon(1e-9));
  CHECK(r8.t_error == doctest::Approx(0.26372556690710).epsilon(1e-7));
  CHECK(r64.t_error == doctest::Approx(0.02617825212780).epsilon(1e-6));
  CHECK(r64.t_error < r8.t_error / 10.0);
  CHECK(r64.s_error < r8.s_error);

  for (const auto& row : seq.rows) {
    if (!row.result) continue;
    CHECK(std::abs(row.s_error - row.s_error_identity) <= 1e-10 * (1.0 + row.s_error));
    CHECK(row.result->max_residual <= 1e-9);
  }
}

TEST_CASE("sources inside an early span are found exactly") {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index dim = testing::random_dim(rng, 3, 7);
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(dim + 1, dim);
    for (Index i = 1; i <= dim; ++i) rows.row(i) = testing::random_gaussian(rng, dim).transpose();
    const Point s = testing::uniform(rng, -1, 1) * rows.row(1).transpose() +
                    testing::uniform(rng, -1, 1) * rows.row(2).transpose();
    const double t = testing::uniform(rng, -2.0, 0.0);
    SrpInstance inst;
    inst.sensors = make_sensor_rows(rows);
    inst.times = forward_simulate(inst.sensors, s, t, Geometry::euclidean);
    const EuclidSetup setup = prepare_euclidean(inst);
    for (Index n = 2; n <= dim; ++n) {
      const GalerkinResult r = solve_srp_n(setup, n);
      if (!r.unique) continue;
      ++checked;
      CHECK(r.t_n == doctest::Approx(t).epsilon(1e-8));
      CHECK((galerkin_point(setup, r) - s).norm() <= 1e-7);
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("full-rank problem agrees with the solver") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = testing::random_dim(rng, 2, 7);
    const auto sim = testing::random_euclidean(rng, dim);
    const EuclidResult full = solve_euclidean(sim.instance);
    const GalerkinResult r = solve_srp_n(full.setup, dim);
    const auto sources = full.sources();
    REQUIRE_FALSE(sources.empty());
    double lowest = sources.front()->t;
    for (const auto* s : sources) lowest = std::min(lowest, s->t);
    CHECK(r.t_n == doctest::Approx(lowest).epsilon(1e-8));
    if (sources.size() == 1) CHECK(r.unique);
  }
}

TEST_CASE("refusals") {
  SrpInstance inst;
  inst.sensors = make_sensor_rows({{0, 0}, {1, 0}, {0, 1}}, 2);
  inst.times = Eigen::Vector3d(0, 5, 0.5);
  const EuclidSetup setup = prepare_euclidean(inst);
  CHECK(code_of([&] { solve_srp_n(setup, 1); }) == ErrorCode::no_solution);
  CHECK(code_of([&] { solve_srp_n(setup, 0); }) == ErrorCode::invalid_instance);
  CHECK(code_of([&] { solve_srp_n(setup, 3); }) == ErrorCode::invalid_instance);

  const EuclidResult full = solve_euclidean(generate("two_solutions", 32).instance);
  CHECK(code_of([&] { galerkin_sequence(full.setup, 33, full.solutions.front(), false); }) ==
        ErrorCode::invalid_instance);
}

TEST_CASE("missing steps are recorded, not fatal") {
  SrpInstance inst;
  inst.sensors = make_sensor_rows({{0, 0}, {1, 0}, {0, 1}}, 2);
  const Point s = Eigen::Vector2d(-0.2, 3.0);
  inst.times = forward_simulate(inst.sensors, s, -0.5, Geometry::euclidean);
  inst.times(1) = 5.0;
  const EuclidSetup setup = prepare_euclidean(inst, {.require_spanning = false});
  EmissionSolution ref;
  ref.s = s;
  ref.t = -0.5;
  const GalerkinSequence seq = galerkin_sequence(setup, 2, ref, false);
  REQUIRE(seq.rows.size() == 2);
  CHECK_FALSE(seq.rows[0].result);
  CHECK_FALSE(seq.rows[0].error.empty());
  CHECK_FALSE(seq.hypotheses.every_step_unique);
}
