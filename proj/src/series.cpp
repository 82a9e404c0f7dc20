#include "srp/series.hpp"

#include <algorithm>
#include <cmath>

namespace srp {

std::string_view to_string(SeriesVerdict verdict) {
  switch (verdict) {
    case SeriesVerdict::converges: return "converges";
    case SeriesVerdict::diverges: return "diverges";
    case SeriesVerdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

ConvergenceVerdict classify_series(const Eigen::Ref<const Eigen::VectorXd>& values, const Tolerances& tol) {
  constexpr double tiny = 1e-300;
  ConvergenceVerdict out;
  const Eigen::Index n = values.size();
  out.length = n;
  const Eigen::Index half = n / 2;
  const Eigen::Index quarter_start = n - n / 4;
  out.partial_at_half = values.head(half).squaredNorm();
  out.partial_at_full = out.partial_at_half + values.tail(n - half).squaredNorm();
  out.last_quarter = values.tail(n - quarter_start).squaredNorm();
  out.growth_ratio = out.partial_at_full / std::max(out.partial_at_half, tiny);
  if (out.partial_at_full <= tiny) out.growth_ratio = 1.0;
  if (n < kMinSeriesLength) return out;

  if (out.partial_at_full <= tiny) {
    out.verdict = SeriesVerdict::converges;
  } else if (out.partial_at_full > (1.0 + tol.div_margin) * out.partial_at_half) {
    out.verdict = SeriesVerdict::diverges;
  } else if (out.last_quarter < tol.conv_margin * out.partial_at_full) {
    out.verdict = SeriesVerdict::converges;
  }
  return out;
}

double trigamma(double x) {
  // recurrence up to x >= 16, then the asymptotic series
  double acc = 0.0;
  while (x < 16.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return acc + inv + 0.5 * inv2 +
         inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0))));
}

double harmonic_tail_product(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Eigen::Index n = std::min(x.size(), y.size());
  if (n == 0) return 0.0;
  // average k * x_k over the last few entries to damp O(1/k^2) wiggle
  const Eigen::Index window = std::clamp<Eigen::Index>(n / 4, 1, 8);
  double ax = 0.0;
  double ay = 0.0;
  for (Eigen::Index k = n - window; k < n; ++k) {
    ax += static_cast<double>(k + 1) * x(k);
    ay += static_cast<double>(k + 1) * y(k);
  }
  ax /= static_cast<double>(window);
  ay /= static_cast<double>(window);
  return ax * ay * trigamma(static_cast<double>(n) + 1.0);
}

}  // namespace srp
