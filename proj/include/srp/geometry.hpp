#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srp/errors.hpp"
#include "srp/tolerances.hpp"

namespace srp {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Sensor coordinates, one row per sensor. Rows are sparse so that
/// truncations of sequence space (N up to ~1e6) stay linear in memory.
template <typename Scalar>
using SensorRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Coordinates of a point in the working orthonormal basis. Entries beyond
/// the stored length are zero.
using Point = Eigen::VectorXd;

enum class Geometry { euclidean, sphere };

/// `finite`: the instance lives in R^N and every coefficient series is a
/// finite sum. `truncated`: the instance is the N-prefix of a problem in
/// sequence space and series behaviour is judged numerically.
enum class SeriesModel { finite, truncated };

struct SrpInstance {
  Geometry geometry = Geometry::euclidean;
  SeriesModel model = SeriesModel::finite;
  SensorRows<double> sensors;  // rows: sensors, cols: truncation N
  Eigen::VectorXd times;

  Index truncation() const { return sensors.cols(); }
  Index size() const { return sensors.rows(); }
  Point sensor(Index i) const { return Point(sensors.row(i).transpose()); }

  /// Throws SrpError(invalid_instance | empty_sensor_list | not_on_sphere).
  void validate(const Tolerances& tol = {}) const;
};

/// Builds sparse sensor rows from dense coordinate lists of length <= n;
/// shorter lists are zero padded.
SensorRows<double> make_sensor_rows(const std::vector<std::vector<double>>& coords, Index n);
SensorRows<double> make_sensor_rows(const Eigen::MatrixXd& dense_rows);

/// Inverse of the "origin of space and time" shift.
struct Normalization {
  Index anchor = 0;
  Point anchor_shift;       // original anchor position
  double time_shift = 0.0;  // original anchor arrival time
  std::vector<Index> order; // original index of each normalized sensor

  Point to_original(const Point& s) const;
  double to_original_time(double t) const { return t + time_shift; }
  Point to_normalized(const Point& s) const;
  double to_normalized_time(double t) const { return t - time_shift; }
  bool is_identity() const;
};

struct Normalized {
  SrpInstance instance;
  Normalization transform;
};

/// Moves sensor `anchor` to index 0 at the origin, with arrival time 0.
/// Remaining sensors keep their relative order.
Normalized normalize(const SrpInstance& instance, Index anchor = 0);

/// Orthonormal frame obtained from the non-anchor sensors by modified
/// Gram-Schmidt, together with the lower-triangular coordinate matrix A
/// (a_ij = <r^(i), e_j>).
///
/// When the input rows are already lower triangular with a positive
/// diagonal the Gram-Schmidt basis is the canonical one; the frame then
/// stores no basis matrix and A is a view of the input rows.
template <typename Scalar>
class TriangularFrame {
 public:
  TriangularFrame() = default;

  Index rank() const { return a_.rows(); }
  Index ambient_dim() const { return ambient_dim_; }
  Index first_row() const { return first_row_; }
  bool canonical() const { return !basis_.has_value(); }
  bool spans_ambient() const { return rank() == ambient_dim_; }

  const SensorRows<Scalar>& a() const { return a_; }
  Vector<Scalar> pivots() const { return a_.diagonal(); }
  Scalar min_pivot() const { return rank() > 0 ? pivots().minCoeff() : Scalar(0); }

  /// Basis vectors e_k as columns (ambient_dim x rank). Materialised on
  /// demand for canonical frames.
  Matrix<Scalar> basis() const {
    if (basis_) return *basis_;
    Matrix<Scalar> e = Matrix<Scalar>::Zero(ambient_dim_, rank());
    for (Index k = 0; k < rank(); ++k) e(k, k) = Scalar(1);
    return e;
  }

  /// Coordinates in the frame of an ambient point (orthogonal projection).
  template <typename Derived>
  Vector<Scalar> to_frame(const Eigen::MatrixBase<Derived>& x) const {
    if (basis_) return basis_->transpose() * x.derived().template cast<Scalar>();
    Vector<Scalar> out = Vector<Scalar>::Zero(rank());
    const Index n = std::min<Index>(rank(), x.size());
    out.head(n) = x.derived().head(n).template cast<Scalar>();
    return out;
  }

  /// Ambient coordinates of frame coordinates (length <= rank).
  template <typename Derived>
  Vector<Scalar> to_ambient(const Eigen::MatrixBase<Derived>& coords) const {
    const Index n = coords.size();
    if (basis_) return basis_->leftCols(n) * coords.derived().template cast<Scalar>();
    Vector<Scalar> out = Vector<Scalar>::Zero(ambient_dim_);
    out.head(n) = coords.derived().template cast<Scalar>();
    return out;
  }

  Point anchor_shift;
  Scalar time_shift = Scalar(0);

  template <typename S>
  friend TriangularFrame<S> gram_schmidt(const SensorRows<S>&, Index, Index, S);

 private:
  SensorRows<Scalar> a_;
  std::optional<Matrix<Scalar>> basis_;
  Index ambient_dim_ = 0;
  Index first_row_ = 0;
};

namespace detail {

template <typename Scalar>
bool rows_are_canonical(const SensorRows<Scalar>& rows, Index first, Index count) {
  for (Index i = 0; i < count; ++i) {
    bool has_pivot = false;
    for (typename SensorRows<Scalar>::InnerIterator it(rows, first + i); it; ++it) {
      if (it.value() == Scalar(0)) continue;
      if (it.col() > i) return false;
      if (it.col() == i) has_pivot = it.value() > Scalar(0);
    }
    if (!has_pivot) return false;
  }
  return true;
}

}  // namespace detail

/// Modified Gram-Schmidt (two passes) over rows [first, first + count) of
/// `rows`, where count = min(available rows, max_rank). Throws
/// SrpError(pivot_too_small, indices = {row}) when a residual norm falls to
/// pivot_tol times the largest sensor norm.
template <typename Scalar>
TriangularFrame<Scalar> gram_schmidt(const SensorRows<Scalar>& rows, Index first, Index max_rank,
                                     Scalar pivot_tol) {
  using std::sqrt;
  const Index n = rows.cols();
  const Index available = rows.rows() - first;
  const Index count = std::min<Index>({available, max_rank, n});
  if (count <= 0) throw SrpError(ErrorCode::empty_sensor_list, "no sensors to build a frame from");

  Scalar max_norm(0);
  for (Index i = 0; i < count; ++i) max_norm = std::max(max_norm, Scalar(rows.row(first + i).norm()));
  const Scalar threshold = pivot_tol * std::max(max_norm, Scalar(1e-300));

  TriangularFrame<Scalar> frame;
  frame.ambient_dim_ = n;
  frame.first_row_ = first;

  if (detail::rows_are_canonical(rows, first, count)) {
    std::vector<Eigen::Triplet<Scalar>> entries;
    for (Index i = 0; i < count; ++i) {
      for (typename SensorRows<Scalar>::InnerIterator it(rows, first + i); it; ++it) {
        if (it.value() != Scalar(0)) entries.emplace_back(i, it.col(), it.value());
      }
    }
    frame.a_.resize(count, count);
    frame.a_.setFromTriplets(entries.begin(), entries.end());
    for (Index i = 0; i < count; ++i) {
      if (!(frame.a_.coeff(i, i) > threshold)) {
        throw SrpError(ErrorCode::pivot_too_small,
                       "sensor " + std::to_string(first + i) + " is (numerically) dependent", {first + i});
      }
    }
    return frame;
  }

  Matrix<Scalar> e(n, count);
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(static_cast<std::size_t>(count * (count + 1) / 2));
  for (Index i = 0; i < count; ++i) {
    Vector<Scalar> d = rows.row(first + i).transpose();
    Vector<Scalar> coeff = Vector<Scalar>::Zero(i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < i; ++j) {
        const Scalar proj = e.col(j).dot(d);
        d.noalias() -= proj * e.col(j);
        coeff(j) += proj;
      }
    }
    const Scalar norm = d.norm();
    if (!(norm > threshold)) {
      throw SrpError(ErrorCode::pivot_too_small,
                     "sensor " + std::to_string(first + i) + " is (numerically) dependent", {first + i});
    }
    e.col(i) = d / norm;
    for (Index j = 0; j < i; ++j) {
      if (coeff(j) != Scalar(0)) entries.emplace_back(i, j, coeff(j));
    }
    entries.emplace_back(i, i, norm);
  }
  frame.a_.resize(count, count);
  frame.a_.setFromTriplets(entries.begin(), entries.end());
  frame.basis_ = std::move(e);
  return frame;
}

/// Solves A x = rhs for the frame's lower-triangular A. For a triangular
/// system Cramer's rule and forward substitution produce the same numbers.
template <typename Scalar, typename Derived>
Vector<Scalar> forward_substitute(const TriangularFrame<Scalar>& frame, const Eigen::MatrixBase<Derived>& rhs) {
  if (rhs.size() != frame.rank()) {
    throw SrpError(ErrorCode::invalid_instance, "right-hand side length does not match frame rank");
  }
  Vector<Scalar> x = rhs.derived().template cast<Scalar>();
  frame.a().template triangularView<Eigen::Lower>().solveInPlace(x);
  return x;
}

/// max_i |(A x - rhs)_i|
template <typename Scalar>
Scalar triangular_residual(const TriangularFrame<Scalar>& frame, const Vector<Scalar>& x,
                           const Vector<Scalar>& rhs) {
  if (rhs.size() == 0) return Scalar(0);
  return (frame.a() * x - rhs).cwiseAbs().maxCoeff();
}

/// Euclidean distances from sensor rows to one dense point. Sums over the
/// zero gaps of each sparse row come from prefix sums of s^2; rows that land
/// close to the point are recomputed densely to avoid cancellation.
class DistanceEvaluator {
 public:
  DistanceEvaluator(const SensorRows<double>& rows, const Point& s, double extra_norm2 = 0.0);

  double distance(Index row) const;
  Eigen::VectorXd distances() const;
  double point_norm() const { return std::sqrt(prefix_.back() + extra_); }

 private:
  double range_sum(Index begin, Index end) const;

  const SensorRows<double>& rows_;
  Point s_;
  std::vector<double> prefix_;  // prefix_[k] = sum_{j<k} s_j^2
  double extra_;
};

/// Maps a frame built on a normalized instance back to the Euclidean
/// frame record (anchor and time shift).
TriangularFrame<double> build_frame(const Normalized& normalized, const Tolerances& tol = {});

/// Frame for sphere instances: every sensor participates, no anchor.
TriangularFrame<double> build_sphere_frame(const SrpInstance& instance, const Tolerances& tol = {});

}  // namespace srp
