#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srp/geometry.hpp"
#include "srp/series.hpp"

namespace srp {

/// Great-circle distance arccos <x, y> on the unit sphere. Near +-1 the
/// chord form 2 asin(|x -+ y| / 2) is used instead; both agree exactly in
/// real arithmetic. Throws SrpError(not_on_sphere).
template <typename DerivedX, typename DerivedY>
double geodesic_distance(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                         double unit_tol = 1e-9) {
  if (std::abs(x.norm() - 1.0) > unit_tol || std::abs(y.norm() - 1.0) > unit_tol) {
    throw SrpError(ErrorCode::not_on_sphere, "geodesic distance needs unit vectors");
  }
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  if (c > 0.9) return 2.0 * std::asin(std::min(1.0, 0.5 * (x - y).norm()));
  if (c < -0.9) return M_PI - 2.0 * std::asin(std::min(1.0, 0.5 * (x + y).norm()));
  return std::acos(c);
}

/// d(x, z) <= d(x, y) + d(y, z) + 1e-12.
bool sphere_triangle_check(const Point& x, const Point& y, const Point& z);

struct TimeInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double t, double slack = 0.0) const { return t >= lo - slack && t <= hi + slack; }
};

/// s_j = p~_j cos t + q~_j sin t, with p~ = A^{-1} (cos t_i), q~ = A^{-1} (sin t_i).
struct SphereCoefficients {
  TriangularFrame<double> frame;
  Eigen::VectorXd p_tilde;
  Eigen::VectorXd q_tilde;
  TimeInterval delta;  // [max t_i - pi, min t_i]
  double alpha = 0.0;  // sum p~^2
  double beta = 0.0;   // sum q~^2
  double gamma = 0.0;  // 2 sum p~ q~
};

/// Throws SrpError(empty_delta) when max t_i - pi > min t_i, and
/// SrpError(not_spanning) when the sensors do not span R^N.
SphereCoefficients build_sphere_coefficients(const SrpInstance& instance, const Tolerances& tol = {});

enum class SphereCase { sph1a, sph1b, sph2, sph3a, sph3b };
enum class SolutionSetKind { finite, interval };

std::string_view to_string(SphereCase label);

struct SphereVerdicts {
  std::optional<ConvergenceVerdict> p;
  std::optional<ConvergenceVerdict> q;
};

/// Finite instances always land in case 3. Throws SrpError(series_undetermined).
SphereCase dispatch_sphere_case(const SphereCoefficients& coeffs, const SrpInstance& instance,
                                const Tolerances& tol = {}, SphereVerdicts* verdicts = nullptr);

struct SphereSolution {
  Point s;
  double t = 0.0;
  SphereCase case_label = SphereCase::sph3a;
  SolutionSetKind set_kind = SolutionSetKind::finite;
  bool approximate = false;    // limit-type answer accepted within approx_resid
  Eigen::VectorXd residuals;   // |t_i - t - arccos <r^(i), s>|
  double max_residual = 0.0;
  double unit_error = 0.0;     // | |s| - 1 |
};

struct SphereRejected {
  double t = 0.0;
  double max_residual = 0.0;
  double unit_error = 0.0;
  std::string reason;
};

/// One step of the nested sublevel-set intersection U_n = {t in Delta : f_n(t) <= 0}.
struct SublevelStep {
  Index n = 0;
  std::vector<TimeInterval> sublevel;      // U_n
  std::vector<TimeInterval> intersection;  // U_1 ^ ... ^ U_n over the schedule
  bool nested = true;                      // U_n contains the running intersection's successor
};

struct SphereResult {
  SphereCoefficients coeffs;
  SphereCase case_label = SphereCase::sph3a;
  SphereVerdicts verdicts;
  std::vector<SphereSolution> solutions;
  std::vector<SphereRejected> rejected;
  std::optional<TimeInterval> interval;  // sph3b: every t in it solves the problem
  std::vector<SublevelStep> sublevel_trace;
};

/// Zeros in [lo, hi] of (a - 1) cos^2 t + (b - 1) sin^2 t + g sin t cos t, from the
/// quadratic (b - 1) u^2 + g u + (a - 1) = 0 in u = tan t plus the cos t = 0 points
/// when |b - 1| <= zero_tol. Sorted, duplicates merged.
std::vector<double> tan_quadratic_zeros(double a, double b, double g, const TimeInterval& window,
                                        double zero_tol = 1e-12);

/// {t in window : f(t) <= 0} for the same trigonometric form.
std::vector<TimeInterval> sublevel_set(double a, double b, double g, const TimeInterval& window,
                                       double zero_tol = 1e-12);

/// s(t) = p~ cos t + q~ sin t in ambient coordinates.
Point sphere_point(const SphereCoefficients& coeffs, double t);

/// Per-sensor residuals |t_i - t - arccos <r^(i), s>| (inner product clamped).
Eigen::VectorXd sphere_residuals(const SrpInstance& instance, const Point& s, double t);

struct ExclusionCertificate {
  bool applicable = false;  // needs three sensors
  bool excluded = false;    // sum > 2 + tol: the continuum case cannot occur
  double sum = 0.0;         // sum_{j<=3} (p~_j^2 + q~_j^2)
};

ExclusionCertificate check_exclusion_3b(const SphereCoefficients& coeffs, double tol = 1e-12);

/// Full pipeline. Throws SrpError(no_root_in_delta) when no candidate time
/// exists in Delta, SrpError(empty_intersection) when the nested sublevel sets
/// run empty, SrpError(not_converging) when they do not shrink below t_conv.
SphereResult solve_sphere(const SrpInstance& instance, const Tolerances& tol = {});

}  // namespace srp
