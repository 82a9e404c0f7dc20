#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "srp/io.hpp"
#include "support.hpp"

using namespace srp;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const SrpError& e) {
    CHECK(e.code() == ErrorCode::invalid_instance);
    return e.what();
  }
  FAIL("expected invalid instance");
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("dense and sparse sensor rows") {
  const InstanceFile f = parse_instance(R"({
    "geometry": "euclidean",
    "sensors": [[0, 0, 0], [1, 2], {"index": [2], "value": [5.0]}],
    "times": [0, 1, 2]
  })");
  CHECK(f.instance.geometry == Geometry::euclidean);
  CHECK(f.instance.model == SeriesModel::finite);
  CHECK(f.instance.truncation() == 3);
  CHECK(f.instance.sensor(1).isApprox(Eigen::Vector3d(1, 2, 0)));
  CHECK(f.instance.sensor(2).isApprox(Eigen::Vector3d(0, 0, 5)));
  CHECK_FALSE(f.ground_truth);
  CHECK_FALSE(f.scenario);

  const InstanceFile wide = parse_instance(R"({"geometry": "sphere", "model": "truncated", "truncation": 10,
    "sensors": [[1], [0, 1]], "times": [0, 1]})");
  CHECK(wide.instance.truncation() == 10);
  CHECK(wide.instance.model == SeriesModel::truncated);
  CHECK(wide.instance.geometry == Geometry::sphere);
}

TEST_CASE("scenario references") {
  const InstanceFile f = parse_instance(R"({"scenario": {"name": "two_solutions", "truncation": 32}})");
  REQUIRE(f.scenario);
  CHECK(f.scenario->name == "two_solutions");
  CHECK(f.instance.truncation() == 32);
  REQUIRE(f.ground_truth);
  CHECK(f.ground_truth->t == doctest::Approx(-M_PI / std::sqrt(6.0)));

  const InstanceFile d = parse_instance(R"({"scenario": {"name": "ellipsoid_dual"}})");
  CHECK(d.instance.truncation() == kDefaultTruncation);

  try {
    parse_instance(R"({"scenario": {"name": "missing"}})");
    FAIL("expected UnknownScenario");
  } catch (const SrpError& e) {
    CHECK(e.code() == ErrorCode::unknown_scenario);
  }
}

TEST_CASE("errors name the offending field") {
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [[0], [1]], "times": [0, "x"]})"),
                 "times[1]"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [[0], [1, true]], "times": [0, 1]})"),
                 "sensors[1][1]"));
  CHECK(contains(error_of(R"({"geometry": "flat", "sensors": [[0]], "times": [0]})"), "geometry"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [[0], [1]], "times": [0]})"), "times"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "times": [0]})"), "sensors"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [{"index": [0, 1], "value": [1]}], "times": [0]})"),
                 "sensors[0]"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [[0, 1]], "times": [0], "truncation": 1})"),
                 "truncation"));
  CHECK(contains(error_of(R"({"geometry": "euclidean", "sensors": [[0, 1]], "times": [0],
                             "ground_truth": {"s": [0, 1], "t": "now"}})"),
                 "ground_truth.t"));
  CHECK(contains(error_of("{\n  \"geometry\": \"euclidean\",\n  \"sensors\": [[0]\n}"), "line 4"));
  CHECK(contains(error_of("[1, 2]"), "expected a JSON object"));
  try {
    parse_instance(R"({"geometry": "euclidean", "sensors": [], "times": []})");
    FAIL("expected EmptySensorList");
  } catch (const SrpError& e) {
    CHECK(e.code() == ErrorCode::empty_sensor_list);
  }
}

TEST_CASE("instance round trip") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const Index dim = testing::random_dim(rng, 1, 12);
    const auto sim = testing::random_euclidean(rng, dim, 2);
    InstanceFile f;
    f.instance = sim.instance;
    f.ground_truth = sim.truth;
    const InstanceFile back = parse_instance(instance_to_json(f).dump());
    CHECK(Eigen::MatrixXd(back.instance.sensors) == Eigen::MatrixXd(f.instance.sensors));
    CHECK(back.instance.times == f.instance.times);
    REQUIRE(back.ground_truth);
    CHECK(back.ground_truth->s == f.ground_truth->s);
    CHECK(back.ground_truth->t == f.ground_truth->t);
  }

  InstanceFile sparse;
  sparse.instance = generate("orthonormal_basis", 512).instance;
  const Json doc = instance_to_json(sparse);
  CHECK(doc["sensors"][300].is_object());
  const InstanceFile back = parse_instance(doc);
  CHECK(Eigen::MatrixXd(back.instance.sensors) == Eigen::MatrixXd(sparse.instance.sensors));
  CHECK(back.instance.model == SeriesModel::truncated);
}

TEST_CASE("changing the truncation") {
  const InstanceFile sc = parse_instance(R"({"scenario": {"name": "orthonormal_basis", "truncation": 16}})");
  const InstanceFile bigger = with_truncation(sc, 64);
  CHECK(bigger.instance.truncation() == 64);
  CHECK(bigger.instance.size() == 65);
  CHECK(bigger.scenario->truncation == 64);

  const InstanceFile plain = parse_instance(R"({"geometry": "euclidean", "sensors": [[0, 0], [1, 0], [0, 1]],
    "times": [0, 1, 1], "ground_truth": {"s": [0.5, 0], "t": -0.5}})");
  const InstanceFile padded = with_truncation(plain, 5);
  CHECK(padded.instance.truncation() == 5);
  CHECK(padded.instance.sensor(2)(1) == 1.0);
  CHECK(padded.ground_truth->s.size() == 5);
  CHECK_THROWS_AS(with_truncation(plain, 1), SrpError);
}

TEST_CASE("report round trip and re-verification") {
  const Scenario sc = generate("two_solutions", 1024);
  const EuclidResult res = solve_euclidean(sc.instance);
  const SolutionReport rep = make_report(res, diagnose_uniqueness(res.setup, res.solutions));
  CHECK(rep.case_label == "case1b");
  REQUIRE(rep.solutions.size() == 2);

  const Json doc = report_to_json(rep);
  const SolutionReport back = report_from_json(Json::parse(doc.dump()));
  REQUIRE(back.solutions.size() == rep.solutions.size());
  for (std::size_t k = 0; k < rep.solutions.size(); ++k) {
    CHECK(back.solutions[k].t == rep.solutions[k].t);
    CHECK(back.solutions[k].s == rep.solutions[k].s);
    CHECK(back.solutions[k].kind == rep.solutions[k].kind);
    CHECK(back.solutions[k].tail_norm2 == rep.solutions[k].tail_norm2);
  }
  CHECK(doc["diagnostics"]["uniqueness"]["guaranteed_unique"] == false);

  const std::vector<double> again = reverify(back, sc.instance);
  REQUIRE(again.size() == rep.solutions.size());
  for (std::size_t k = 0; k < again.size(); ++k) {
    CHECK(again[k] <= 2.0 * rep.solutions[k].max_residual + 1e-15);
  }

  const Scenario sph = generate("sphere_orthonormal", 64);
  const SolutionReport srep = make_report(solve_sphere(sph.instance));
  const SolutionReport sback = report_from_json(report_to_json(srep));
  CHECK(sback.geometry == Geometry::sphere);
  CHECK(sback.case_label == "sph1a");
  CHECK(reverify(sback, sph.instance).front() <= 1e-12);
}
