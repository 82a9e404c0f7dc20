#include "srp/euclid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srp {

std::string_view to_string(SolutionKind kind) { return kind == SolutionKind::source ? "source" : "dual"; }

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::case0: return "case0";
    case CaseLabel::case1a: return "case1a";
    case CaseLabel::case1b: return "case1b";
  }
  return "case1b";
}

std::string_view to_string(SolutionStatus status) {
  return status == SolutionStatus::verified ? "verified" : "approximate";
}

std::vector<const EmissionSolution*> EuclidResult::sources() const {
  std::vector<const EmissionSolution*> out;
  for (const auto& s : solutions) {
    if (s.kind == SolutionKind::source) out.push_back(&s);
  }
  return out;
}

std::vector<const EmissionSolution*> EuclidResult::duals() const {
  std::vector<const EmissionSolution*> out;
  for (const auto& s : solutions) {
    if (s.kind == SolutionKind::dual) out.push_back(&s);
  }
  return out;
}

double EuclidResult::best_residual() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : solutions) best = std::min(best, s.max_residual);
  for (const auto& r : rejected) best = std::min(best, r.max_residual);
  return best;
}

LinearCoefficients build_coefficients(const SrpInstance& normalized, const TriangularFrame<double>& frame,
                                      const Tolerances& tol) {
  const Index m = frame.rank();
  const Index first = frame.first_row();
  LinearCoefficients out;
  out.b.resize(m);
  out.c.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double t = normalized.times(first + i);
    out.b(i) = 0.5 * (normalized.sensors.row(first + i).squaredNorm() - t * t);
    out.c(i) = t;
  }
  out.b_tilde = forward_substitute(frame, out.b);
  out.c_tilde = forward_substitute(frame, out.c);
  out.residual_b = triangular_residual(frame, out.b_tilde, out.b);
  out.residual_c = triangular_residual(frame, out.c_tilde, out.c);
  const double bound_b = tol.solve * (1.0 + (m > 0 ? out.b.cwiseAbs().maxCoeff() : 0.0));
  const double bound_c = tol.solve * (1.0 + (m > 0 ? out.c.cwiseAbs().maxCoeff() : 0.0));
  if (!(out.residual_b <= bound_b) || !(out.residual_c <= bound_c)) {
    throw SrpError(ErrorCode::ill_conditioned, "triangular elimination residual exceeds solve tolerance");
  }
  return out;
}

EuclidSetup prepare_euclidean(const SrpInstance& instance, const EuclidOptions& options) {
  if (instance.geometry != Geometry::euclidean) {
    throw SrpError(ErrorCode::invalid_instance, "euclidean solver called on a sphere instance");
  }
  instance.validate(options.tol);
  EuclidSetup setup;
  setup.normalized = normalize(instance, options.anchor);
  setup.frame = build_frame(setup.normalized, options.tol);
  if (options.require_spanning && !setup.frame.spans_ambient()) {
    throw SrpError(ErrorCode::not_spanning, "sensors span " + std::to_string(setup.frame.rank()) +
                                                " of " + std::to_string(setup.frame.ambient_dim()) +
                                                " dimensions; the solution would not be unique");
  }
  setup.coeffs = build_coefficients(setup.normalized.instance, setup.frame, options.tol);
  return setup;
}

EmissionQuadratic emission_quadratic(const LinearCoefficients& coeffs, const SrpInstance& normalized,
                                     const TriangularFrame<double>& frame, TailModel tail) {
  EmissionQuadratic q;
  const auto& bt = coeffs.b_tilde;
  const auto& ct = coeffs.c_tilde;
  if (tail == TailModel::harmonic && normalized.model == SeriesModel::truncated && frame.spans_ambient() &&
      bt.size() >= kMinSeriesLength) {
    q.tail_bb = harmonic_tail_product(bt, bt);
    q.tail_bc = harmonic_tail_product(bt, ct);
    q.tail_cc = harmonic_tail_product(ct, ct);
  }
  q.alpha = bt.squaredNorm() + q.tail_bb;
  q.beta = 2.0 * (bt.dot(ct) + q.tail_bc);
  q.gamma = ct.squaredNorm() + q.tail_cc - 1.0;
  return q;
}

PrefixQuadratics prefix_quadratics(const LinearCoefficients& coeffs) {
  const Index m = coeffs.b_tilde.size();
  PrefixQuadratics p;
  p.alpha.resize(m);
  p.beta.resize(m);
  p.gamma.resize(m);
  double a = 0.0, b = 0.0, c = 0.0;
  for (Index j = 0; j < m; ++j) {
    const double bt = coeffs.b_tilde(j);
    const double ct = coeffs.c_tilde(j);
    a += bt * bt;
    b += 2.0 * bt * ct;
    c += ct * ct;
    p.alpha(j) = a;
    p.beta(j) = b;
    p.gamma(j) = c - 1.0;
  }
  return p;
}

CaseLabel dispatch_case(const LinearCoefficients& coeffs, const SrpInstance& normalized, const Tolerances& tol,
                        ConvergenceVerdict* b_out, ConvergenceVerdict* c_out) {
  const double case0_tol = tol.resid * tol.resid * static_cast<double>(normalized.truncation());
  if (coeffs.b_tilde.squaredNorm() <= case0_tol) return CaseLabel::case0;
  if (normalized.model == SeriesModel::finite) return CaseLabel::case1b;

  const ConvergenceVerdict vb = classify_series(coeffs.b_tilde, tol);
  const ConvergenceVerdict vc = classify_series(coeffs.c_tilde, tol);
  if (b_out) *b_out = vb;
  if (c_out) *c_out = vc;
  switch (vc.verdict) {
    case SeriesVerdict::diverges: return CaseLabel::case1a;
    case SeriesVerdict::converges: return CaseLabel::case1b;
    case SeriesVerdict::undetermined: break;
  }
  throw SrpError(ErrorCode::series_undetermined,
                 "cannot tell whether sum c~^2 converges at truncation " + std::to_string(normalized.truncation()) +
                     " (growth ratio " + std::to_string(vc.growth_ratio) + "); raise the truncation");
}

Eigen::VectorXd reconstruct_frame_source(const LinearCoefficients& coeffs, double t) {
  return coeffs.b_tilde + t * coeffs.c_tilde;
}

Point reconstruct_source(const LinearCoefficients& coeffs, const TriangularFrame<double>& frame, double t) {
  Point s = frame.to_ambient(reconstruct_frame_source(coeffs, t));
  const Index n = std::min(s.size(), frame.anchor_shift.size());
  s.head(n) += frame.anchor_shift.head(n);
  return s;
}

double Verification::max_residual() const {
  if (source_residuals.size() == 0) return 0.0;
  const double src = source_residuals.maxCoeff();
  const double dual = dual_residuals.maxCoeff();
  if (kind == SolutionKind::dual) return dual;
  if (kind == SolutionKind::source) return src;
  return std::min(src, dual);
}

Verification check_solution(const SrpInstance& instance, const Point& s, double t, double resid_tol,
                            double extra_norm2) {
  Verification v;
  const DistanceEvaluator eval(instance.sensors, s, extra_norm2);
  const Eigen::VectorXd d = eval.distances();
  const Eigen::ArrayXd lag = instance.times.array() - t;
  v.source_residuals = (lag - d.array()).abs().matrix();
  v.dual_residuals = (lag + d.array()).abs().matrix();
  const double src = v.source_residuals.maxCoeff();
  const double dual = v.dual_residuals.maxCoeff();
  if (src <= resid_tol) {
    v.kind = SolutionKind::source;
  } else if (dual <= resid_tol) {
    v.kind = SolutionKind::dual;
  } else {
    const Eigen::VectorXd& closer = src <= dual ? v.source_residuals : v.dual_residuals;
    for (Index i = 0; i < closer.size(); ++i) {
      if (closer(i) > resid_tol) v.offending.push_back(i);
    }
  }
  return v;
}

Verification verify_solution(const SrpInstance& instance, const Point& s, double t, const Tolerances& tol,
                             double extra_norm2) {
  Verification v = check_solution(instance, s, t, tol.resid, extra_norm2);
  if (!v.kind) {
    std::vector<long> idx(v.offending.begin(), v.offending.end());
    std::string list;
    for (std::size_t k = 0; k < idx.size() && k < 8; ++k) list += (k ? "," : "") + std::to_string(idx[k]);
    throw SrpError(ErrorCode::mixed, "neither forward nor time-reversed equations hold; sensors [" + list + "]",
                   std::move(idx));
  }
  return v;
}

namespace {

Eigen::VectorXd to_original_order(const Eigen::VectorXd& values, const Normalization& transform) {
  Eigen::VectorXd out(values.size());
  for (Index k = 0; k < values.size(); ++k) out(transform.order[static_cast<std::size_t>(k)]) = values(k);
  return out;
}

/// Fills coordinates, residuals and status of a candidate at normalized time t.
EmissionSolution make_candidate(const EuclidSetup& setup, double t, double extra_norm2, double resid_tol) {
  const SrpInstance& inst = setup.normalized.instance;
  EmissionSolution sol;
  sol.s_frame = reconstruct_frame_source(setup.coeffs, t);
  const Point s_norm = setup.frame.to_ambient(sol.s_frame);
  sol.tail_norm2 = extra_norm2;
  const Verification v = check_solution(inst, s_norm, t, resid_tol, extra_norm2);
  const bool dual = v.kind == SolutionKind::dual;
  sol.kind = dual ? SolutionKind::dual : SolutionKind::source;
  sol.status = v.kind ? SolutionStatus::verified : SolutionStatus::approximate;
  const Eigen::VectorXd& res = dual ? v.dual_residuals : v.source_residuals;
  sol.residuals = to_original_order(res, setup.normalized.transform);
  sol.max_residual = res.size() ? res.maxCoeff() : 0.0;
  sol.s = setup.normalized.transform.to_original(s_norm);
  sol.t = setup.normalized.transform.to_original_time(t);
  if (t != 0.0) sol.z = 1.0 / t;
  return sol;
}

}  // namespace

std::vector<EmissionSolution> solve_case1b(const EuclidSetup& setup, const EmissionQuadratic& q,
                                           const Tolerances& tol, std::vector<RejectedCandidate>* rejected) {
  const SrpInstance& inst = setup.normalized.instance;
  const double min_t = inst.times.minCoeff();
  const double max_t = inst.times.maxCoeff();

  double disc = q.discriminant();
  const double window = tol.disc_rel * (q.beta * q.beta + std::abs(4.0 * q.alpha * q.gamma) + 1.0);
  if (disc < -window) {
    throw SrpError(ErrorCode::negative_discriminant,
                   "emission quadratic has no real root (D = " + std::to_string(disc) + ")");
  }
  const bool tangent = std::abs(disc) <= window;
  disc = std::max(disc, 0.0);

  std::vector<double> roots;
  if (q.alpha == 0.0) {
    if (q.beta != 0.0) roots.push_back(-q.gamma / q.beta);
  } else {
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (q.beta + std::copysign(sq, q.beta));
    if (qq != 0.0) {
      roots.push_back(qq / q.alpha);
      roots.push_back(q.gamma / qq);
    } else {
      roots.push_back(0.0);
    }
    if (disc == 0.0) roots.resize(1);
    // near a double root the split roots carry sqrt(eps) error; the vertex does not
    if (tangent && disc > 0.0) roots.push_back(-q.beta / (2.0 * q.alpha));
  }
  std::sort(roots.begin(), roots.end());

  std::vector<EmissionSolution> out;
  for (double z : roots) {
    if (z == 0.0 || !std::isfinite(z)) continue;
    const double t = 1.0 / z;
    std::optional<SolutionKind> expected;
    if (z < 0.0 && t <= min_t + tol.resid) expected = SolutionKind::source;
    else if (t >= max_t - tol.resid) expected = SolutionKind::dual;
    if (!expected) {
      if (rejected) {
        rejected->push_back({setup.normalized.transform.to_original_time(t),
                             std::numeric_limits<double>::infinity(), "emission time between arrival times"});
      }
      continue;
    }
    EmissionSolution sol = make_candidate(setup, t, q.tail_norm2(t), tol.resid);
    sol.case_label = CaseLabel::case1b;
    sol.z = z;
    if (sol.status == SolutionStatus::verified && sol.kind == *expected) {
      out.push_back(std::move(sol));
    } else if (rejected) {
      rejected->push_back({sol.t, sol.max_residual, "residual verification failed"});
    }
  }
  if (tangent && out.size() > 1) {
    std::vector<EmissionSolution> merged;
    for (auto& sol : out) {
      auto same = std::find_if(merged.begin(), merged.end(), [&](const EmissionSolution& m) {
        return m.kind == sol.kind && std::abs(m.t - sol.t) <= 1e-6 * (1.0 + std::abs(sol.t));
      });
      if (same == merged.end()) merged.push_back(std::move(sol));
      else if (sol.max_residual < same->max_residual) *same = std::move(sol);
    }
    out = std::move(merged);
  }
  return out;
}

EmissionSolution solve_case1a(const EuclidSetup& setup, const Tolerances& tol, Case1aTrace* trace,
                              std::vector<Index> schedule) {
  const Index m = setup.coeffs.b_tilde.size();
  if (schedule.empty()) schedule = {m / 8, m / 4, m / 2, m};
  std::erase_if(schedule, [m](Index n) { return n < 1 || n > m; });
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  if (schedule.empty()) throw SrpError(ErrorCode::not_converging, "empty iterate schedule");

  const PrefixQuadratics p = prefix_quadratics(setup.coeffs);
  Case1aTrace local;
  for (Index n : schedule) {
    const double a = p.alpha(n - 1);
    if (!(a > 0.0)) continue;
    local.schedule.push_back(n);
    local.iterates.push_back(-p.beta(n - 1) / (2.0 * a));
  }
  if (local.iterates.empty()) throw SrpError(ErrorCode::not_converging, "sum b~^2 vanishes on the schedule");
  const double z = local.iterates.back();
  local.convergence = local.iterates.size() > 1
                          ? std::abs(local.iterates.back() - local.iterates[local.iterates.size() - 2])
                          : std::numeric_limits<double>::infinity();
  if (trace) *trace = local;
  if (!(local.convergence <= tol.z_conv)) {
    throw SrpError(ErrorCode::not_converging, "vertex iterates moved by " + std::to_string(local.convergence) +
                                                  " between the last two schedule points; raise the truncation");
  }
  if (z == 0.0) throw SrpError(ErrorCode::not_converging, "vertex iterate reached z = 0");

  EmissionSolution sol = make_candidate(setup, 1.0 / z, 0.0, tol.resid);
  sol.case_label = CaseLabel::case1a;
  sol.z = z;
  if (sol.status == SolutionStatus::verified && sol.kind != SolutionKind::source) {
    sol.status = SolutionStatus::approximate;
  }
  sol.kind = SolutionKind::source;
  return sol;
}

UniquenessReport diagnose_uniqueness(const EuclidSetup& setup, const std::vector<EmissionSolution>& solutions,
                                     const Tolerances& tol) {
  UniquenessReport rep;
  const SrpInstance& inst = setup.normalized.instance;
  const Normalization& tr = setup.normalized.transform;

  for (const auto& sol : solutions) {
    if (sol.kind == SolutionKind::dual && sol.status == SolutionStatus::verified) rep.dual_exists = true;
  }

  for (const auto& sol : solutions) {
    if (sol.kind != SolutionKind::source) continue;
    const Point s_norm = tr.to_normalized(sol.s);
    const DistanceEvaluator eval(inst.sensors, s_norm);
    const double scale = 1.0 + s_norm.norm();
    for (Index i = 0; i < inst.size(); ++i) {
      if (eval.distance(i) <= tol.resid * scale) {
        rep.coincides_with_sensor = true;
        rep.coinciding_sensor = tr.order[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (rep.coincides_with_sensor) break;
  }

  if (inst.model == SeriesModel::truncated) {
    const auto& a = setup.frame.a();
    std::vector<Index> seq;
    std::vector<double> norms;
    for (Index n = 0; n < a.rows(); ++n) {
      const double row_norm = a.row(n).norm();
      bool orthogonal = true;
      for (SensorRows<double>::InnerIterator it(a, n); it; ++it) {
        if (it.col() < n && std::abs(it.value()) > tol.ortho * row_norm) {
          orthogonal = false;
          break;
        }
      }
      if (orthogonal && row_norm > 0.0) {
        seq.push_back(n + 1);
        norms.push_back(row_norm);
      }
    }
    if (!norms.empty()) {
      rep.band_lower = *std::min_element(norms.begin(), norms.end());
      rep.band_upper = *std::max_element(norms.begin(), norms.end());
    }
    const std::size_t count = seq.size();
    if (count >= 4 && 4 * seq.back() >= 3 * a.rows()) {
      const std::size_t q = count / 4;
      const double head = *std::min_element(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(q));
      const double tail = *std::min_element(norms.end() - static_cast<std::ptrdiff_t>(q), norms.end());
      rep.orthogonal_subsequence = tail > 0.0 && tail >= 0.5 * head;
    }
    rep.subsequence = std::move(seq);
  }

  if (inst.size() >= 3) {
    const double r1 = inst.sensors.row(1).norm();
    for (Index j = 2; j < inst.size(); ++j) {
      const SensorRows<double> sum = inst.sensors.row(j) + inst.sensors.row(1);
      if (sum.norm() <= tol.antipode * (1.0 + r1)) {
        rep.antipodal_pair = true;
        rep.antipodal_sensor = tr.order[static_cast<std::size_t>(j)];
        break;
      }
    }
  }
  return rep;
}

Extension extend_antipodal(const SrpInstance& instance, const std::optional<GroundTruth>& ground_truth,
                           std::optional<double> measured_time, const Tolerances& tol) {
  if (instance.size() < 2) throw SrpError(ErrorCode::invalid_instance, "need an anchor and r^(1) to extend");
  const Point anchor = instance.sensor(0);
  const Point antipode = 2.0 * anchor - instance.sensor(1);
  const double scale = 1.0 + (instance.sensor(1) - anchor).norm();

  Extension ext;
  ext.instance = instance;
  for (Index j = 1; j < instance.size(); ++j) {
    if ((instance.sensor(j) - antipode).norm() <= tol.antipode * scale) {
      ext.antipode_index = j;
      return ext;
    }
  }

  double time = 0.0;
  if (measured_time) {
    time = *measured_time;
  } else if (ground_truth) {
    Point s = Point::Zero(instance.truncation());
    const Index n = std::min(s.size(), ground_truth->s.size());
    s.head(n) = ground_truth->s.head(n);
    time = ground_truth->t + std::sqrt((antipode - s).squaredNorm() + ground_truth->tail_norm2);
  } else {
    throw SrpError(ErrorCode::missing_arrival_time, "antipodal sensor needs a measured time or a ground truth");
  }

  const Index m = instance.size();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(instance.sensors.nonZeros() + antipode.size()));
  for (Index i = 0; i < m; ++i) {
    for (SensorRows<double>::InnerIterator it(instance.sensors, i); it; ++it) {
      entries.emplace_back(i, it.col(), it.value());
    }
  }
  for (Index j = 0; j < antipode.size(); ++j) {
    if (antipode(j) != 0.0) entries.emplace_back(m, j, antipode(j));
  }
  ext.instance.sensors.resize(m + 1, instance.truncation());
  ext.instance.sensors.setFromTriplets(entries.begin(), entries.end());
  ext.instance.times.conservativeResize(m + 1);
  ext.instance.times(m) = time;
  ext.added = true;
  ext.antipode_index = m;
  return ext;
}

EuclidResult solve_euclidean(const SrpInstance& instance, const EuclidOptions& options) {
  const Tolerances& tol = options.tol;
  EuclidResult result;
  result.setup = prepare_euclidean(instance, options);
  const EuclidSetup& setup = result.setup;
  const SrpInstance& inst = setup.normalized.instance;
  result.quadratic = emission_quadratic(setup.coeffs, inst, setup.frame, options.tail);

  ConvergenceVerdict vb, vc;
  result.case_label = dispatch_case(setup.coeffs, inst, tol, &vb, &vc);
  if (inst.model == SeriesModel::truncated && result.case_label != CaseLabel::case0) {
    result.b_verdict = vb;
    result.c_verdict = vc;
  }

  switch (result.case_label) {
    case CaseLabel::case0: {
      EmissionSolution sol = make_candidate(setup, 0.0, 0.0, tol.resid);
      sol.case_label = CaseLabel::case0;
      if (sol.status == SolutionStatus::verified && sol.kind == SolutionKind::source) {
        result.solutions.push_back(std::move(sol));
      } else {
        result.rejected.push_back({sol.t, sol.max_residual, "residual verification failed"});
      }
      break;
    }
    case CaseLabel::case1a: {
      Case1aTrace trace;
      EmissionSolution sol = solve_case1a(setup, tol, &trace);
      result.case1a = trace;
      if (sol.status == SolutionStatus::verified || sol.max_residual <= tol.approx_resid) {
        result.solutions.push_back(std::move(sol));
      } else {
        result.rejected.push_back({sol.t, sol.max_residual, "vertex limit does not satisfy the equations"});
      }
      break;
    }
    case CaseLabel::case1b:
      result.solutions = solve_case1b(setup, result.quadratic, tol, &result.rejected);
      break;
  }
  return result;
}

}  // namespace srp
