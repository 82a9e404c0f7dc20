#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srp/euclid_solver.hpp"

namespace srp {

/// Sign of the t^2 coefficient of the finite emission equation
/// (sum c~^2 - 1) t^2 + 2 sum b~ c~ t + sum b~^2 = 0, which decides the root.
enum class GalerkinBranch { leading_positive, leading_negative, linear };

std::string_view to_string(GalerkinBranch branch);

struct GalerkinResult {
  Index n = 0;
  double t_n = 0.0;              // original time axis
  Eigen::VectorXd s_frame;       // frame coordinates 1..n; every later coordinate is 0
  GalerkinBranch branch = GalerkinBranch::leading_positive;
  bool unique = true;            // only one root passed the t <= min t_i filter
  Eigen::VectorXd residuals;     // sensors 0..n in normalized order
  double max_residual = 0.0;
};

/// SRP_n: sensors 0..n solved inside their span. Needs 1 <= n <= frame rank.
/// Throws SrpError(no_solution) when no real root satisfies t <= min_{i<=n} t_i.
GalerkinResult solve_srp_n(const EuclidSetup& setup, Index n, const Tolerances& tol = {});
GalerkinResult solve_srp_n(const SrpInstance& instance, Index n, const EuclidOptions& options = {});

/// Original ambient coordinates of s^(n).
Point galerkin_point(const EuclidSetup& setup, const GalerkinResult& result);

struct GalerkinRow {
  Index n = 0;
  std::optional<GalerkinResult> result;
  std::string error;           // set when SRP_n had no solution
  double t_error = 0.0;        // |t^(n) - t^(inf)|
  double s_error = 0.0;        // |s^(n) - s^(inf)| from the coordinates
  double s_error_identity = 0.0;  // same, from (dt)^2 sum_{j<=n} c~^2 + sum_{j>n} (s^(inf)_j)^2
};

struct GalerkinHypotheses {
  bool reference_unique = false;
  bool every_step_unique = true;
  bool nonzero_sources = true;
  std::optional<SeriesVerdict> c_series;
  bool hold() const {
    return reference_unique && every_step_unique && nonzero_sources && c_series == SeriesVerdict::converges;
  }
};

struct GalerkinSequence {
  std::vector<GalerkinRow> rows;
  double t_reference = 0.0;
  GalerkinHypotheses hypotheses;
};

/// Solves SRP_n for n = 1..n_max against the reference solution (s^(inf), t^(inf)).
/// `reference_unique` is the caller's uniqueness verdict for that reference.
GalerkinSequence galerkin_sequence(const EuclidSetup& setup, Index n_max, const EmissionSolution& reference,
                                   bool reference_unique, const Tolerances& tol = {});

/// Source solution whose emission time is closest to `t_hint`, or nullptr.
const EmissionSolution* closest_source(const EuclidResult& result, double t_hint);

}  // namespace srp
