#include "srp/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srp {

std::string_view to_string(GalerkinBranch branch) {
  switch (branch) {
    case GalerkinBranch::leading_positive: return "leading_positive";
    case GalerkinBranch::leading_negative: return "leading_negative";
    case GalerkinBranch::linear: return "linear";
  }
  return "linear";
}

GalerkinResult solve_srp_n(const EuclidSetup& setup, Index n, const Tolerances& tol) {
  const Index m = setup.coeffs.b_tilde.size();
  if (n < 1 || n > m) {
    throw SrpError(ErrorCode::invalid_instance,
                   "SRP_n needs 1 <= n <= " + std::to_string(m) + ", got " + std::to_string(n), {n});
  }
  const auto bt = setup.coeffs.b_tilde.head(n);
  const auto ct = setup.coeffs.c_tilde.head(n);
  const double a = ct.squaredNorm() - 1.0;
  const double b = 2.0 * bt.dot(ct);
  const double c = bt.squaredNorm();

  const SrpInstance& inst = setup.normalized.instance;
  const double min_t = inst.times.head(n + 1).minCoeff();

  GalerkinResult out;
  out.n = n;
  std::vector<double> roots;
  if (std::abs(a) <= 1e-14 * (std::abs(b) + std::abs(c) + 1.0)) {
    out.branch = GalerkinBranch::linear;
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    out.branch = a > 0.0 ? GalerkinBranch::leading_positive : GalerkinBranch::leading_negative;
    double disc = b * b - 4.0 * a * c;
    const double window = tol.disc_rel * (b * b + std::abs(4.0 * a * c) + 1.0);
    if (disc >= -window) {
      disc = std::max(disc, 0.0);
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }

  std::vector<double> qualifying;
  for (double t : roots) {
    if (std::isfinite(t) && t <= min_t + tol.resid) qualifying.push_back(t);
  }
  if (qualifying.empty()) {
    throw SrpError(ErrorCode::no_solution, "SRP_" + std::to_string(n) + " has no root with t <= min t_i", {n});
  }
  std::sort(qualifying.begin(), qualifying.end());
  const double t = qualifying.front();
  out.unique = qualifying.size() == 1 || std::abs(qualifying.back() - t) <= tol.resid;
  out.t_n = setup.normalized.transform.to_original_time(t);
  out.s_frame = bt + t * ct;

  const Point s = setup.frame.to_ambient(out.s_frame);
  const DistanceEvaluator eval(inst.sensors, s);
  out.residuals.resize(n + 1);
  for (Index i = 0; i <= n; ++i) out.residuals(i) = std::abs(inst.times(i) - t - eval.distance(i));
  out.max_residual = out.residuals.maxCoeff();
  return out;
}

GalerkinResult solve_srp_n(const SrpInstance& instance, Index n, const EuclidOptions& options) {
  EuclidOptions relaxed = options;
  relaxed.require_spanning = false;
  return solve_srp_n(prepare_euclidean(instance, relaxed), n, options.tol);
}

Point galerkin_point(const EuclidSetup& setup, const GalerkinResult& result) {
  return setup.normalized.transform.to_original(setup.frame.to_ambient(result.s_frame));
}

GalerkinSequence galerkin_sequence(const EuclidSetup& setup, Index n_max, const EmissionSolution& reference,
                                   bool reference_unique, const Tolerances& tol) {
  const Index m = setup.coeffs.b_tilde.size();
  if (n_max < 1 || n_max > m) {
    throw SrpError(ErrorCode::invalid_instance,
                   "max n must lie in [1, " + std::to_string(m) + "], got " + std::to_string(n_max), {n_max});
  }
  GalerkinSequence seq;
  seq.t_reference = reference.t;
  seq.hypotheses.reference_unique = reference_unique;
  if (setup.normalized.instance.model == SeriesModel::finite) {
    seq.hypotheses.c_series = SeriesVerdict::converges;
  } else if (m >= kMinSeriesLength) {
    seq.hypotheses.c_series = classify_series(setup.coeffs.c_tilde, tol).verdict;
  }

  const Eigen::VectorXd s_ref = reference.s_frame.size() > 0
                                    ? reference.s_frame
                                    : setup.frame.to_frame(setup.normalized.transform.to_normalized(reference.s));
  const Point s_ref_ambient = setup.frame.to_ambient(s_ref);
  // suffix[k] = sum_{j>=k} s_ref_j^2
  std::vector<double> suffix(static_cast<std::size_t>(s_ref.size()) + 1, 0.0);
  for (Index j = s_ref.size() - 1; j >= 0; --j) {
    suffix[static_cast<std::size_t>(j)] = suffix[static_cast<std::size_t>(j) + 1] + s_ref(j) * s_ref(j);
  }
  double c_prefix = 0.0;

  for (Index n = 1; n <= n_max; ++n) {
    const double ct = setup.coeffs.c_tilde(n - 1);
    c_prefix += ct * ct;
    GalerkinRow row;
    row.n = n;
    try {
      GalerkinResult r = solve_srp_n(setup, n, tol);
      const double dt = r.t_n - reference.t;
      row.t_error = std::abs(dt);
      const Point diff = setup.frame.to_ambient(r.s_frame) - s_ref_ambient;
      row.s_error = std::sqrt(diff.squaredNorm() + reference.tail_norm2);
      const double tail = n < static_cast<Index>(suffix.size()) ? suffix[static_cast<std::size_t>(n)] : 0.0;
      row.s_error_identity = std::sqrt(dt * dt * c_prefix + tail + reference.tail_norm2);
      if (!r.unique) seq.hypotheses.every_step_unique = false;
      if (r.s_frame.squaredNorm() == 0.0) seq.hypotheses.nonzero_sources = false;
      row.result = std::move(r);
    } catch (const SrpError& e) {
      if (e.code() != ErrorCode::no_solution) throw;
      row.error = e.what();
      seq.hypotheses.every_step_unique = false;
      row.t_error = std::numeric_limits<double>::quiet_NaN();
      row.s_error = row.s_error_identity = std::numeric_limits<double>::quiet_NaN();
    }
    seq.rows.push_back(std::move(row));
  }
  return seq;
}

const EmissionSolution* closest_source(const EuclidResult& result, double t_hint) {
  const EmissionSolution* best = nullptr;
  for (const EmissionSolution* s : result.sources()) {
    if (!best || std::abs(s->t - t_hint) < std::abs(best->t - t_hint)) best = s;
  }
  return best;
}

}  // namespace srp
