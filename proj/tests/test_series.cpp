#include <doctest.h>

#include <cmath>

#include "srp/series.hpp"

using namespace srp;

namespace {

Eigen::VectorXd sequence(Eigen::Index n, double power) {
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = std::pow(static_cast<double>(k + 1), -power);
  return v;
}

}  // namespace

TEST_CASE("1/k converges") {
  const ConvergenceVerdict v = classify_series(sequence(4096, 1.0));
  CHECK(v.verdict == SeriesVerdict::converges);
  CHECK(v.partial_at_full == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-3));
  CHECK(v.growth_ratio >= 1.0);
  CHECK(v.length == 4096);
}

TEST_CASE("constant sequence diverges") {
  const ConvergenceVerdict v = classify_series(Eigen::VectorXd::Ones(64));
  CHECK(v.verdict == SeriesVerdict::diverges);
  CHECK(v.growth_ratio == doctest::Approx(2.0));
}

TEST_CASE("1/sqrt(k) diverges at large N") {
  CHECK(classify_series(sequence(4096, 0.5)).verdict == SeriesVerdict::diverges);
  const ConvergenceVerdict small = classify_series(sequence(16, 0.5));
  CHECK(small.verdict != SeriesVerdict::converges);
}

TEST_CASE("borderline decay is undetermined") {
  const ConvergenceVerdict v = classify_series(sequence(64, 0.8));
  CHECK(v.verdict == SeriesVerdict::undetermined);
  CHECK(v.growth_ratio < 1.05);
}

TEST_CASE("short or zero inputs") {
  CHECK(classify_series(Eigen::VectorXd::Ones(8)).verdict == SeriesVerdict::undetermined);
  CHECK(classify_series(Eigen::VectorXd::Zero(32)).verdict == SeriesVerdict::converges);
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(32);
  spike(0) = 1.0;
  CHECK(classify_series(spike).verdict == SeriesVerdict::converges);
}

TEST_CASE("trigamma against reference values") {
  CHECK(trigamma(1.0) == doctest::Approx(1.644934066848226436).epsilon(1e-14));
  CHECK(trigamma(3.25) == doctest::Approx(0.3597982903095798751).epsilon(1e-14));
  CHECK(trigamma(10.5) == doctest::Approx(0.09991695605912673320).epsilon(1e-14));
  CHECK(trigamma(1e6) == doctest::Approx(1.0000005e-6).epsilon(1e-10));
}

TEST_CASE("harmonic tail of 1/k is the trigamma tail") {
  const Eigen::VectorXd x = sequence(1000, 1.0);
  CHECK(harmonic_tail_product(x, x) == doctest::Approx(trigamma(1001.0)).epsilon(1e-10));
  const Eigen::VectorXd y = 3.0 * x;
  CHECK(harmonic_tail_product(x, y) == doctest::Approx(3.0 * trigamma(1001.0)).epsilon(1e-10));
  CHECK(harmonic_tail_product(Eigen::VectorXd::Zero(100), x) == 0.0);
}
