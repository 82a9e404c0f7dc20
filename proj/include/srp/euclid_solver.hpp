#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srp/geometry.hpp"
#include "srp/series.hpp"

namespace srp {

/// Right-hand data of the linear part of the implied equations,
/// sum_{j<=i} a_ij s_j = b_i + t c_i, and its triangular elimination
/// s_j = b~_j + t c~_j.
struct LinearCoefficients {
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd b_tilde;
  Eigen::VectorXd c_tilde;
  double residual_b = 0.0;  // max |A b~ - b|
  double residual_c = 0.0;  // max |A c~ - c|
};

enum class TailModel { none, harmonic };

/// alpha z^2 + beta z + gamma = 0 in z = 1/t, with alpha = sum b~^2,
/// beta = 2 sum b~ c~, gamma = sum c~^2 - 1. Tail estimates (beyond the
/// truncation) are folded into alpha, beta, gamma when present.
struct EmissionQuadratic {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double tail_bb = 0.0;
  double tail_bc = 0.0;
  double tail_cc = 0.0;

  double discriminant() const { return beta * beta - 4.0 * alpha * gamma; }
  /// Squared norm of the coordinates beyond the truncation at emission time t.
  double tail_norm2(double t) const { return tail_bb + 2.0 * t * tail_bc + t * t * tail_cc; }
};

/// Prefix sums alpha_n, beta_n, gamma_n of the same quadratic, n = 1..rank.
struct PrefixQuadratics {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
};

enum class SolutionKind { source, dual };
enum class CaseLabel { case0, case1a, case1b };
enum class SolutionStatus { verified, approximate };

std::string_view to_string(SolutionKind kind);
std::string_view to_string(CaseLabel label);
std::string_view to_string(SolutionStatus status);

struct EmissionSolution {
  Point s;               // original coordinates, length N
  Eigen::VectorXd s_frame;  // frame coordinates of the normalized source
  double t = 0.0;        // original time axis
  std::optional<double> z;  // 1/t on the normalized time axis
  SolutionKind kind = SolutionKind::source;
  CaseLabel case_label = CaseLabel::case1b;
  SolutionStatus status = SolutionStatus::verified;
  Eigen::VectorXd residuals;  // per sensor, original order
  double max_residual = 0.0;
  double tail_norm2 = 0.0;    // estimated |s|^2 beyond the truncation
};

/// Candidate rejected by residual verification; kept for diagnostics.
struct RejectedCandidate {
  double t = 0.0;
  double max_residual = 0.0;
  std::string reason;
};

struct Case1aTrace {
  std::vector<Index> schedule;
  std::vector<double> iterates;  // z_n for n in schedule
  double convergence = 0.0;      // |z_N - z_{N/2}|
};

struct EuclidOptions {
  Tolerances tol;
  Index anchor = 0;
  TailModel tail = TailModel::harmonic;
  bool require_spanning = true;
};

struct EuclidSetup {
  Normalized normalized;
  TriangularFrame<double> frame;
  LinearCoefficients coeffs;
};

struct EuclidResult {
  EuclidSetup setup;
  EmissionQuadratic quadratic;
  CaseLabel case_label = CaseLabel::case1b;
  std::optional<ConvergenceVerdict> b_verdict;
  std::optional<ConvergenceVerdict> c_verdict;
  std::optional<Case1aTrace> case1a;
  std::vector<EmissionSolution> solutions;
  std::vector<RejectedCandidate> rejected;

  std::vector<const EmissionSolution*> sources() const;
  std::vector<const EmissionSolution*> duals() const;
  /// Smallest max-residual over every candidate, accepted or not; +inf if none.
  double best_residual() const;
};

/// b_i = (|r^(i)|^2 - t_i^2) / 2, c_i = t_i over the frame's basis sensors,
/// eliminated through the frame. Throws SrpError(ill_conditioned) when the
/// triangular solves miss their residual bound.
LinearCoefficients build_coefficients(const SrpInstance& normalized, const TriangularFrame<double>& frame,
                                      const Tolerances& tol = {});

/// Normalization + frame + coefficients.
EuclidSetup prepare_euclidean(const SrpInstance& instance, const EuclidOptions& options = {});

EmissionQuadratic emission_quadratic(const LinearCoefficients& coeffs, const SrpInstance& normalized,
                                     const TriangularFrame<double>& frame, TailModel tail);
PrefixQuadratics prefix_quadratics(const LinearCoefficients& coeffs);

/// case0 iff sum b~^2 <= resid^2 * N; otherwise case1a iff c~ diverges
/// (truncated model only), else case1b. Throws SrpError(series_undetermined).
CaseLabel dispatch_case(const LinearCoefficients& coeffs, const SrpInstance& normalized,
                        const Tolerances& tol = {}, ConvergenceVerdict* b_out = nullptr,
                        ConvergenceVerdict* c_out = nullptr);

/// s_j = b~_j + t c~_j in frame coordinates (normalized axes).
Eigen::VectorXd reconstruct_frame_source(const LinearCoefficients& coeffs, double t);

/// Frame coordinates -> original ambient coordinates.
Point reconstruct_source(const LinearCoefficients& coeffs, const TriangularFrame<double>& frame, double t);

struct Verification {
  std::optional<SolutionKind> kind;  // empty: neither residual vector is small
  Eigen::VectorXd source_residuals;  // |t_i - t - d_i|
  Eigen::VectorXd dual_residuals;    // |t_i - t + d_i|
  std::vector<Index> offending;      // sensors failing the better-matching side
  double max_residual() const;
};

/// Residual check of (s, t) against every sensor; `extra_norm2` is added to
/// each squared distance (coordinates beyond the truncation).
Verification check_solution(const SrpInstance& instance, const Point& s, double t, double resid_tol,
                            double extra_norm2 = 0.0);

/// Like check_solution, but throws SrpError(mixed) when neither the
/// forward nor the time-reversed equations hold.
Verification verify_solution(const SrpInstance& instance, const Point& s, double t, const Tolerances& tol = {},
                             double extra_norm2 = 0.0);

/// Roots of the emission quadratic filtered into source (z < 0, t <= min t_i)
/// and dual (t >= max t_i) solutions. Throws SrpError(negative_discriminant).
std::vector<EmissionSolution> solve_case1b(const EuclidSetup& setup, const EmissionQuadratic& quadratic,
                                           const Tolerances& tol, std::vector<RejectedCandidate>* rejected = nullptr);

/// Parabola-vertex iterates z_n = -beta_n / (2 alpha_n) over `schedule`
/// (default {N/8, N/4, N/2, N}); t = 1/z_N. Throws SrpError(not_converging).
EmissionSolution solve_case1a(const EuclidSetup& setup, const Tolerances& tol, Case1aTrace* trace = nullptr,
                              std::vector<Index> schedule = {});

struct UniquenessReport {
  bool dual_exists = false;
  bool coincides_with_sensor = false;
  bool orthogonal_subsequence = false;
  bool antipodal_pair = false;
  bool guaranteed_unique() const {
    return dual_exists || coincides_with_sensor || orthogonal_subsequence || antipodal_pair;
  }

  std::optional<Index> coinciding_sensor;  // original index
  std::vector<Index> subsequence;          // frame rows (1-based sensor numbering)
  double band_lower = 0.0;
  double band_upper = 0.0;
  std::optional<Index> antipodal_sensor;   // original index
};

UniquenessReport diagnose_uniqueness(const EuclidSetup& setup, const std::vector<EmissionSolution>& solutions,
                                     const Tolerances& tol = {});

/// Appends -r^(1) (relative to the anchor). Its arrival time comes from
/// `measured_time`, or from forward simulation of `ground_truth`.
struct Extension {
  SrpInstance instance;
  bool added = false;  // false when the antipode was already present
  Index antipode_index = -1;
};

struct GroundTruth {
  Point s;
  double t = 0.0;
  double tail_norm2 = 0.0;  // |s|^2 beyond the stored coordinates
};

Extension extend_antipodal(const SrpInstance& instance, const std::optional<GroundTruth>& ground_truth,
                           std::optional<double> measured_time = std::nullopt, const Tolerances& tol = {});

/// Full pipeline: normalize, frame, coefficients, dispatch, roots, verification.
EuclidResult solve_euclidean(const SrpInstance& instance, const EuclidOptions& options = {});

}  // namespace srp
