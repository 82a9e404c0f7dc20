#include "srp/sphere_solver.hpp"

#include <algorithm>
#include <cmath>

namespace srp {

namespace {

constexpr double kPi = M_PI;

double trig_form(double a, double b, double g, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  return (a - 1.0) * c * c + (b - 1.0) * s * s + g * s * c;
}

double trig_form_derivative(double a, double b, double g, double t) {
  return (b - a) * std::sin(2.0 * t) + g * std::cos(2.0 * t);
}

void push_periodic(double t0, double period, const TimeInterval& w, std::vector<double>& out) {
  const double k_lo = std::ceil((w.lo - t0) / period);
  const double k_hi = std::floor((w.hi - t0) / period);
  for (double k = k_lo; k <= k_hi; k += 1.0) out.push_back(t0 + k * period);
}

std::vector<TimeInterval> intersect(const std::vector<TimeInterval>& x, const std::vector<TimeInterval>& y,
                                    double slack) {
  std::vector<TimeInterval> out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].lo, y[j].lo);
    const double hi = std::min(x[i].hi, y[j].hi);
    if (lo <= hi + slack) out.push_back({std::min(lo, hi), std::max(lo, hi)});
    if (x[i].hi < y[j].hi) ++i;
    else ++j;
  }
  return out;
}

bool contained(const std::vector<TimeInterval>& inner, const std::vector<TimeInterval>& outer, double slack) {
  for (const auto& a : inner) {
    const bool inside = std::any_of(outer.begin(), outer.end(), [&](const TimeInterval& b) {
      return a.lo >= b.lo - slack && a.hi <= b.hi + slack;
    });
    if (!inside) return false;
  }
  return true;
}

}  // namespace

bool sphere_triangle_check(const Point& x, const Point& y, const Point& z) {
  return geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12;
}

std::string_view to_string(SphereCase label) {
  switch (label) {
    case SphereCase::sph1a: return "sph1a";
    case SphereCase::sph1b: return "sph1b";
    case SphereCase::sph2: return "sph2";
    case SphereCase::sph3a: return "sph3a";
    case SphereCase::sph3b: return "sph3b";
  }
  return "sph3a";
}

SphereCoefficients build_sphere_coefficients(const SrpInstance& instance, const Tolerances& tol) {
  if (instance.geometry != Geometry::sphere) {
    throw SrpError(ErrorCode::invalid_instance, "sphere solver called on a euclidean instance");
  }
  instance.validate(tol);
  SphereCoefficients out;
  const double lo = instance.times.maxCoeff() - kPi;
  const double hi = instance.times.minCoeff();
  if (lo > hi + tol.resid) {
    throw SrpError(ErrorCode::empty_delta, "arrival times spread by more than pi; no emission time fits");
  }
  out.delta = {std::min(lo, hi), hi};

  out.frame = build_sphere_frame(instance, tol);
  if (!out.frame.spans_ambient()) {
    throw SrpError(ErrorCode::not_spanning, "sensors span " + std::to_string(out.frame.rank()) + " of " +
                                                std::to_string(out.frame.ambient_dim()) + " dimensions");
  }
  const Index m = out.frame.rank();
  const Eigen::VectorXd cos_t = instance.times.head(m).array().cos().matrix();
  const Eigen::VectorXd sin_t = instance.times.head(m).array().sin().matrix();
  out.p_tilde = forward_substitute(out.frame, cos_t);
  out.q_tilde = forward_substitute(out.frame, sin_t);
  const double rp = triangular_residual(out.frame, out.p_tilde, cos_t);
  const double rq = triangular_residual(out.frame, out.q_tilde, sin_t);
  if (!(rp <= 2.0 * tol.solve) || !(rq <= 2.0 * tol.solve)) {
    throw SrpError(ErrorCode::ill_conditioned, "triangular elimination residual exceeds solve tolerance");
  }
  out.alpha = out.p_tilde.squaredNorm();
  out.beta = out.q_tilde.squaredNorm();
  out.gamma = 2.0 * out.p_tilde.dot(out.q_tilde);
  return out;
}

SphereCase dispatch_sphere_case(const SphereCoefficients& coeffs, const SrpInstance& instance,
                                const Tolerances& tol, SphereVerdicts* verdicts) {
  auto case3 = [&] {
    const bool flat = std::abs(coeffs.alpha - 1.0) <= tol.sph3b && std::abs(coeffs.beta - 1.0) <= tol.sph3b &&
                      std::abs(coeffs.gamma) <= tol.sph3b;
    return flat ? SphereCase::sph3b : SphereCase::sph3a;
  };
  if (instance.model == SeriesModel::finite) return case3();

  const ConvergenceVerdict vp = classify_series(coeffs.p_tilde, tol);
  const ConvergenceVerdict vq = classify_series(coeffs.q_tilde, tol);
  if (verdicts) *verdicts = {vp, vq};
  if (vp.verdict == SeriesVerdict::undetermined || vq.verdict == SeriesVerdict::undetermined) {
    throw SrpError(ErrorCode::series_undetermined,
                   "cannot tell whether sum p~^2 and sum q~^2 converge at truncation " +
                       std::to_string(instance.truncation()) + "; raise the truncation");
  }
  const bool p_conv = vp.verdict == SeriesVerdict::converges;
  const bool q_conv = vq.verdict == SeriesVerdict::converges;
  if (p_conv && !q_conv) return SphereCase::sph1a;
  if (!p_conv && q_conv) return SphereCase::sph1b;
  if (!p_conv && !q_conv) return SphereCase::sph2;
  return case3();
}

std::vector<double> tan_quadratic_zeros(double a, double b, double g, const TimeInterval& window,
                                        double zero_tol) {
  const double c2 = b - 1.0, c1 = g, c0 = a - 1.0;
  const double scale = std::abs(c2) + std::abs(c1) + std::abs(c0) + 1.0;
  std::vector<double> zeros;
  if (std::abs(c2) <= zero_tol * scale) push_periodic(kPi / 2.0, kPi, window, zeros);

  std::vector<double> roots;
  if (c2 == 0.0) {
    if (c1 != 0.0) roots.push_back(-c0 / c1);
  } else {
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= -1e-12 * (c1 * c1 + std::abs(4.0 * c2 * c0) + 1.0)) {
      disc = std::max(disc, 0.0);
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      if (q != 0.0) {
        roots.push_back(q / c2);
        roots.push_back(c0 / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  for (double u : roots) {
    if (std::isnan(u)) continue;
    push_periodic(std::atan(u), kPi, window, zeros);
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
              zeros.end());
  return zeros;
}

std::vector<TimeInterval> sublevel_set(double a, double b, double g, const TimeInterval& window, double zero_tol) {
  std::vector<double> cuts{window.lo};
  for (double z : tan_quadratic_zeros(a, b, g, window, zero_tol)) cuts.push_back(z);
  cuts.push_back(window.hi);

  std::vector<TimeInterval> raw;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    if (trig_form(a, b, g, mid) <= 0.0) raw.push_back({cuts[k], cuts[k + 1]});
  }
  for (std::size_t k = 1; k + 1 < cuts.size(); ++k) raw.push_back({cuts[k], cuts[k]});
  if (window.width() == 0.0 && trig_form(a, b, g, window.lo) <= 0.0) raw.push_back(window);
  std::sort(raw.begin(), raw.end(), [](const TimeInterval& x, const TimeInterval& y) { return x.lo < y.lo; });

  std::vector<TimeInterval> out;
  for (const auto& iv : raw) {
    if (!out.empty() && iv.lo <= out.back().hi + 1e-15) out.back().hi = std::max(out.back().hi, iv.hi);
    else out.push_back(iv);
  }
  return out;
}

Point sphere_point(const SphereCoefficients& coeffs, double t) {
  return coeffs.frame.to_ambient(Eigen::VectorXd(coeffs.p_tilde * std::cos(t) + coeffs.q_tilde * std::sin(t)));
}

Eigen::VectorXd sphere_residuals(const SrpInstance& instance, const Point& s, double t) {
  const double norm = s.norm();
  const bool unit = std::abs(norm - 1.0) <= 1e-9;
  const DistanceEvaluator near(instance.sensors, s);
  const DistanceEvaluator far(instance.sensors, Point(-s));
  Eigen::VectorXd out(instance.size());
  for (Index i = 0; i < instance.size(); ++i) {
    const double dot = instance.sensors.row(i).dot(s);
    double d;
    if (unit && dot > 0.9) d = 2.0 * std::asin(std::min(1.0, 0.5 * near.distance(i)));
    else if (unit && dot < -0.9) d = kPi - 2.0 * std::asin(std::min(1.0, 0.5 * far.distance(i)));
    else d = std::acos(std::clamp(dot, -1.0, 1.0));
    out(i) = std::abs(instance.times(i) - t - d);
  }
  return out;
}

ExclusionCertificate check_exclusion_3b(const SphereCoefficients& coeffs, double tol) {
  ExclusionCertificate cert;
  if (coeffs.p_tilde.size() < 3) return cert;
  cert.applicable = true;
  cert.sum = coeffs.p_tilde.head(3).squaredNorm() + coeffs.q_tilde.head(3).squaredNorm();
  cert.excluded = cert.sum > 2.0 + tol;
  return cert;
}

SphereResult solve_sphere(const SrpInstance& instance, const Tolerances& tol) {
  SphereResult result;
  result.coeffs = build_sphere_coefficients(instance, tol);
  const SphereCoefficients& co = result.coeffs;
  result.case_label = dispatch_sphere_case(co, instance, tol, &result.verdicts);
  const TimeInterval& delta = co.delta;

  auto evaluate = [&](double t, Point s, bool limit_type) {
    SphereSolution sol;
    sol.t = t;
    sol.case_label = result.case_label;
    sol.residuals = sphere_residuals(instance, s, t);
    sol.max_residual = sol.residuals.maxCoeff();
    sol.unit_error = std::abs(s.norm() - 1.0);
    sol.s = std::move(s);
    const double worst = std::max(sol.max_residual, sol.unit_error);
    if (worst <= tol.resid) {
      result.solutions.push_back(std::move(sol));
    } else if (limit_type && worst <= tol.approx_resid) {
      sol.approximate = true;
      result.solutions.push_back(std::move(sol));
    } else {
      result.rejected.push_back({t, sol.max_residual, sol.unit_error,
                                 sol.unit_error > tol.resid ? "reconstructed point is off the sphere"
                                                            : "geodesic residual verification failed"});
    }
  };

  std::vector<double> candidates;
  switch (result.case_label) {
    case SphereCase::sph1a:
      push_periodic(0.0, kPi, delta, candidates);
      if (candidates.empty()) throw SrpError(ErrorCode::no_root_in_delta, "no multiple of pi lies in Delta");
      for (double t : candidates) evaluate(t, co.frame.to_ambient(Eigen::VectorXd(co.p_tilde * std::cos(t))), false);
      break;
    case SphereCase::sph1b:
      push_periodic(kPi / 2.0, kPi, delta, candidates);
      if (candidates.empty()) throw SrpError(ErrorCode::no_root_in_delta, "no point of pi/2 + pi Z lies in Delta");
      for (double t : candidates) evaluate(t, co.frame.to_ambient(Eigen::VectorXd(co.q_tilde * std::sin(t))), false);
      break;
    case SphereCase::sph3a: {
      candidates = tan_quadratic_zeros(co.alpha, co.beta, co.gamma, delta, tol.sph3b);
      if (candidates.empty()) throw SrpError(ErrorCode::no_root_in_delta, "the tan quadratic has no root in Delta");
      for (double t : candidates) {
        for (int it = 0; it < 3; ++it) {
          const double d = trig_form_derivative(co.alpha, co.beta, co.gamma, t);
          if (std::abs(d) < 1e-8) break;
          const double step = trig_form(co.alpha, co.beta, co.gamma, t) / d;
          if (std::abs(step) > 1e-6 || !delta.contains(t - step)) break;
          t -= step;
        }
        evaluate(t, sphere_point(co, t), false);
      }
      break;
    }
    case SphereCase::sph3b: {
      result.interval = delta;
      const double t = 0.5 * (delta.lo + delta.hi);
      evaluate(t, sphere_point(co, t), false);
      for (auto& sol : result.solutions) sol.set_kind = SolutionSetKind::interval;
      break;
    }
    case SphereCase::sph2: {
      const Index m = co.p_tilde.size();
      std::vector<Index> schedule;
      for (Index n = 1; n < m; n *= 2) schedule.push_back(n);
      schedule.push_back(m);
      std::vector<TimeInterval> running{delta};
      std::vector<TimeInterval> previous{delta};
      double a = 0.0, b = 0.0, g = 0.0;
      Index done = 0;
      for (Index n : schedule) {
        for (; done < n; ++done) {
          a += co.p_tilde(done) * co.p_tilde(done);
          b += co.q_tilde(done) * co.q_tilde(done);
          g += 2.0 * co.p_tilde(done) * co.q_tilde(done);
        }
        SublevelStep step;
        step.n = n;
        step.sublevel = sublevel_set(a, b, g, delta);
        step.nested = contained(step.sublevel, previous, 1e-9);
        running = intersect(running, step.sublevel, 1e-12);
        step.intersection = running;
        previous = step.sublevel;
        result.sublevel_trace.push_back(step);
        if (running.empty()) {
          throw SrpError(ErrorCode::empty_intersection,
                         "nested sublevel sets ran empty at n = " + std::to_string(n), {n});
        }
      }
      const double width = running.back().hi - running.front().lo;
      if (width > tol.t_conv) {
        throw SrpError(ErrorCode::not_converging, "nested sublevel sets still span " + std::to_string(width) +
                                                      " at the truncation; raise it");
      }
      for (const auto& iv : running) {
        const double t = 0.5 * (iv.lo + iv.hi);
        evaluate(t, sphere_point(co, t), true);
      }
      break;
    }
  }
  return result;
}

}  // namespace srp
