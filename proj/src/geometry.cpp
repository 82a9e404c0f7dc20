#include "srp/geometry.hpp"

#include <cmath>
#include <numeric>

namespace srp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_instance: return "InvalidInstance";
    case ErrorCode::empty_sensor_list: return "EmptySensorList";
    case ErrorCode::pivot_too_small: return "PivotTooSmall";
    case ErrorCode::not_spanning: return "NotSpanning";
    case ErrorCode::ill_conditioned: return "IllConditioned";
    case ErrorCode::series_undetermined: return "SeriesUndetermined";
    case ErrorCode::negative_discriminant: return "NegativeDiscriminant";
    case ErrorCode::not_converging: return "NotConverging";
    case ErrorCode::mixed: return "Mixed";
    case ErrorCode::missing_arrival_time: return "MissingArrivalTime";
    case ErrorCode::no_solution: return "NoSolution";
    case ErrorCode::not_on_sphere: return "NotOnSphere";
    case ErrorCode::empty_delta: return "EmptyDelta";
    case ErrorCode::empty_intersection: return "EmptyIntersection";
    case ErrorCode::no_root_in_delta: return "NoRootInDelta";
    case ErrorCode::unknown_scenario: return "UnknownScenario";
  }
  return "Unknown";
}

void SrpInstance::validate(const Tolerances& tol) const {
  if (size() == 0) throw SrpError(ErrorCode::empty_sensor_list, "instance has no sensors");
  if (truncation() < 1) throw SrpError(ErrorCode::invalid_instance, "truncation must be positive");
  if (times.size() != size()) {
    throw SrpError(ErrorCode::invalid_instance, "sensors and times differ in length (" +
                                                    std::to_string(size()) + " vs " +
                                                    std::to_string(times.size()) + ")");
  }
  for (Index i = 0; i < size(); ++i) {
    if (!std::isfinite(times(i))) {
      throw SrpError(ErrorCode::invalid_instance, "times[" + std::to_string(i) + "] is not finite", {i});
    }
    for (SensorRows<double>::InnerIterator it(sensors, i); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw SrpError(ErrorCode::invalid_instance,
                       "sensors[" + std::to_string(i) + "][" + std::to_string(it.col()) + "] is not finite", {i});
      }
    }
  }
  if (geometry == Geometry::sphere) {
    for (Index i = 0; i < size(); ++i) {
      const double norm = sensors.row(i).norm();
      if (std::abs(norm - 1.0) > tol.unit) {
        throw SrpError(ErrorCode::not_on_sphere,
                       "sensors[" + std::to_string(i) + "] has norm " + std::to_string(norm), {i});
      }
    }
  } else if (size() < 2) {
    throw SrpError(ErrorCode::invalid_instance, "euclidean instance needs an anchor and at least one sensor");
  }
}

SensorRows<double> make_sensor_rows(const std::vector<std::vector<double>>& coords, Index n) {
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (static_cast<Index>(coords[i].size()) > n) {
      throw SrpError(ErrorCode::invalid_instance,
                     "sensors[" + std::to_string(i) + "] has more coordinates than the truncation",
                     {static_cast<long>(i)});
    }
    for (std::size_t j = 0; j < coords[i].size(); ++j) {
      if (coords[i][j] != 0.0) entries.emplace_back(static_cast<Index>(i), static_cast<Index>(j), coords[i][j]);
    }
  }
  SensorRows<double> rows(static_cast<Index>(coords.size()), n);
  rows.setFromTriplets(entries.begin(), entries.end());
  return rows;
}

SensorRows<double> make_sensor_rows(const Eigen::MatrixXd& dense_rows) {
  SensorRows<double> rows = dense_rows.sparseView();
  rows.makeCompressed();
  return rows;
}

Point Normalization::to_original(const Point& s) const {
  Point out = s;
  const Index n = std::min(out.size(), anchor_shift.size());
  out.head(n) += anchor_shift.head(n);
  return out;
}

Point Normalization::to_normalized(const Point& s) const {
  Point out = s;
  const Index n = std::min(out.size(), anchor_shift.size());
  out.head(n) -= anchor_shift.head(n);
  return out;
}

bool Normalization::is_identity() const {
  if (time_shift != 0.0 || anchor != 0) return false;
  return anchor_shift.size() == 0 || anchor_shift.isZero(0.0);
}

Normalized normalize(const SrpInstance& instance, Index anchor) {
  if (instance.size() == 0) throw SrpError(ErrorCode::empty_sensor_list, "instance has no sensors");
  if (anchor < 0 || anchor >= instance.size()) {
    throw SrpError(ErrorCode::invalid_instance, "anchor index out of range", {anchor});
  }
  Normalized out;
  out.transform.anchor = anchor;
  out.transform.anchor_shift = instance.sensor(anchor);
  out.transform.time_shift = instance.times(anchor);
  out.transform.order.push_back(anchor);
  for (Index i = 0; i < instance.size(); ++i) {
    if (i != anchor) out.transform.order.push_back(i);
  }

  const Point& shift = out.transform.anchor_shift;
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<char> touched(static_cast<std::size_t>(instance.truncation()), 0);
  std::vector<Index> shift_support;
  for (Index j = 0; j < shift.size(); ++j) {
    if (shift(j) != 0.0) shift_support.push_back(j);
  }

  SrpInstance& norm = out.instance;
  norm.geometry = instance.geometry;
  norm.model = instance.model;
  norm.times.resize(instance.size());
  for (Index k = 0; k < instance.size(); ++k) {
    const Index i = out.transform.order[static_cast<std::size_t>(k)];
    norm.times(k) = instance.times(i) - out.transform.time_shift;
    if (k == 0) continue;
    for (SensorRows<double>::InnerIterator it(instance.sensors, i); it; ++it) {
      touched[static_cast<std::size_t>(it.col())] = 1;
      const double v = it.value() - shift(it.col());
      if (v != 0.0) entries.emplace_back(k, it.col(), v);
    }
    for (Index j : shift_support) {
      if (!touched[static_cast<std::size_t>(j)]) entries.emplace_back(k, j, -shift(j));
    }
    for (SensorRows<double>::InnerIterator it(instance.sensors, i); it; ++it) {
      touched[static_cast<std::size_t>(it.col())] = 0;
    }
  }
  norm.sensors.resize(instance.size(), instance.truncation());
  norm.sensors.setFromTriplets(entries.begin(), entries.end());
  norm.times(0) = 0.0;
  return out;
}

DistanceEvaluator::DistanceEvaluator(const SensorRows<double>& rows, const Point& s, double extra_norm2)
    : rows_(rows), s_(Point::Zero(rows.cols())), extra_(extra_norm2) {
  const Index n = std::min(s.size(), rows.cols());
  s_.head(n) = s.head(n);
  prefix_.assign(static_cast<std::size_t>(s_.size()) + 1, 0.0);
  for (Index j = 0; j < s_.size(); ++j) {
    prefix_[static_cast<std::size_t>(j) + 1] = prefix_[static_cast<std::size_t>(j)] + s_(j) * s_(j);
  }
}

double DistanceEvaluator::range_sum(Index begin, Index end) const {
  if (end <= begin) return 0.0;
  return prefix_[static_cast<std::size_t>(end)] - prefix_[static_cast<std::size_t>(begin)];
}

double DistanceEvaluator::distance(Index row) const {
  double on_support = 0.0;
  double gaps = 0.0;
  double row_norm2 = 0.0;
  Index next = 0;
  for (SensorRows<double>::InnerIterator it(rows_, row); it; ++it) {
    const double diff = it.value() - s_(it.col());
    on_support += diff * diff;
    row_norm2 += it.value() * it.value();
    gaps += range_sum(next, it.col());
    next = it.col() + 1;
  }
  gaps += range_sum(next, s_.size());
  double d2 = std::max(gaps, 0.0) + on_support + extra_;
  const double scale = prefix_.back() + row_norm2 + extra_;
  if (d2 < 1e-4 * scale) {
    // near coincidence: prefix differences lose too many digits
    Point diff = s_;
    for (SensorRows<double>::InnerIterator it(rows_, row); it; ++it) diff(it.col()) -= it.value();
    d2 = diff.squaredNorm() + extra_;
  }
  return std::sqrt(d2);
}

Eigen::VectorXd DistanceEvaluator::distances() const {
  Eigen::VectorXd out(rows_.rows());
  for (Index i = 0; i < rows_.rows(); ++i) out(i) = distance(i);
  return out;
}

TriangularFrame<double> build_frame(const Normalized& normalized, const Tolerances& tol) {
  const SrpInstance& inst = normalized.instance;
  TriangularFrame<double> frame = gram_schmidt<double>(inst.sensors, 1, inst.truncation(), tol.pivot);
  frame.anchor_shift = normalized.transform.anchor_shift;
  frame.time_shift = normalized.transform.time_shift;
  return frame;
}

TriangularFrame<double> build_sphere_frame(const SrpInstance& instance, const Tolerances& tol) {
  TriangularFrame<double> frame = gram_schmidt<double>(instance.sensors, 0, instance.truncation(), tol.pivot);
  frame.anchor_shift = Point::Zero(instance.truncation());
  return frame;
}

}  // namespace srp
