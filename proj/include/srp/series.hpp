#pragma once

#include <Eigen/Dense>

#include <string_view>

#include "srp/tolerances.hpp"

namespace srp {

enum class SeriesVerdict { converges, diverges, undetermined };

std::string_view to_string(SeriesVerdict verdict);

/// Numerical stand-in for "does sum x_k^2 converge" judged from a finite
/// prefix: compares the partial sum of squares at N with the one at N/2 and
/// the share of the last quarter.
struct ConvergenceVerdict {
  SeriesVerdict verdict = SeriesVerdict::undetermined;
  double partial_at_half = 0.0;
  double partial_at_full = 0.0;
  double last_quarter = 0.0;
  double growth_ratio = 1.0;  // partial_at_full / max(partial_at_half, tiny)
  Eigen::Index length = 0;
};

/// Minimum prefix length the classifier accepts.
inline constexpr Eigen::Index kMinSeriesLength = 16;

/// Shorter inputs yield `undetermined`.
ConvergenceVerdict classify_series(const Eigen::Ref<const Eigen::VectorXd>& values, const Tolerances& tol = {});

/// Harmonic tail model for coefficient sequences decaying like a/k:
/// sum_{k>n} x_k y_k ~ a_x a_y psi_1(n + 1). Returns the estimated tail of the
/// product series; zero sequences give zero.
double harmonic_tail_product(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Trigamma psi_1(x) = sum_{k>=0} 1/(x+k)^2 for x >= 1.
double trigamma(double x);

}  // namespace srp
