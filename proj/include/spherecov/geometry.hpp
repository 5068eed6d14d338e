#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spherecov/error.hpp"
#include "spherecov/random.hpp"

namespace spherecov {

inline constexpr double unit_norm_tolerance = 1e-12;

/// Finite set of points on S^d, stored as rows of an n x (d+1) matrix.
class SpherePointSet {
public:
  SpherePointSet(int d, Eigen::MatrixXd points) : d_(d), points_(std::move(points)) {
    if (d < 1) throw error(errc::invalid_argument, "sphere dimension must be >= 1");
    if (points_.cols() != d + 1) {
      throw error(errc::geometry_mismatch,
                  "points on S^" + std::to_string(d) + " need " +
                      std::to_string(d + 1) + " coordinates, got " +
                      std::to_string(points_.cols()));
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
      const double norm = points_.row(i).norm();
      if (!(std::abs(norm - 1.0) <= unit_norm_tolerance)) {
        throw error(errc::domain, "point " + std::to_string(i) +
                                      " is not a unit vector (norm " +
                                      std::to_string(norm) + ")");
      }
    }
  }

  /// Normalizes each row before validating; for user-supplied coordinates.
  static SpherePointSet normalized(int d, Eigen::MatrixXd points) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const double norm = points.row(i).norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw error(errc::domain, "point " + std::to_string(i) + " has zero norm");
      }
      points.row(i) /= norm;
    }
    return SpherePointSet(d, std::move(points));
  }

  int dimension() const noexcept { return d_; }
  Eigen::Index size() const noexcept { return points_.rows(); }
  const Eigen::MatrixXd &coordinates() const noexcept { return points_; }
  auto point(Eigen::Index i) const { return points_.row(i); }

private:
  int d_;
  Eigen::MatrixXd points_;
};

/// Points (x_i, t_i) on S^d x R.
struct SpaceTimePointSet {
  SpherePointSet space;
  std::vector<double> times;

  SpaceTimePointSet(SpherePointSet s, std::vector<double> t)
      : space(std::move(s)), times(std::move(t)) {
    if (static_cast<Eigen::Index>(times.size()) != space.size()) {
      throw error(errc::geometry_mismatch, "space and time point counts differ");
    }
  }
  Eigen::Index size() const noexcept { return space.size(); }
};

/// Points (x_i, y_i) on S^d1 x S^d2.
struct ProductPointSet {
  SpherePointSet first;
  SpherePointSet second;

  ProductPointSet(SpherePointSet a, SpherePointSet b)
      : first(std::move(a)), second(std::move(b)) {
    if (first.size() != second.size()) {
      throw error(errc::geometry_mismatch, "factor point counts differ");
    }
  }
  Eigen::Index size() const noexcept { return first.size(); }
};

/// n points on S^d from normalized standard Gaussian (d+1)-vectors; the
/// points come from stream `stream::points` of `seed`, in row order.
inline SpherePointSet uniform_sphere_points(int d, Eigen::Index n,
                                            std::uint64_t seed) {
  if (d < 1 || n < 1) {
    throw error(errc::invalid_argument, "uniform_sphere_points needs d >= 1, n >= 1");
  }
  auto rng = rng_stream(seed, stream::points);
  Eigen::MatrixXd pts(n, d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j <= d; ++j) pts(i, j) = rng.normal();
      norm = pts.row(i).norm();
    } while (norm == 0.0);
    pts.row(i) /= norm;
  }
  return SpherePointSet(d, std::move(pts));
}

/// Cosine of the geodesic angle, clamp(<p, q>, -1, 1).
template <class A, class B>
double geodesic_cosine(const Eigen::MatrixBase<A> &p, const Eigen::MatrixBase<B> &q) {
  if (p.size() != q.size()) {
    throw error(errc::dimension_mismatch, "points have different dimensions");
  }
  const double np = p.norm();
  const double nq = q.norm();
  if (!(std::abs(np - 1.0) <= unit_norm_tolerance) ||
      !(std::abs(nq - 1.0) <= unit_norm_tolerance)) {
    throw error(errc::domain, "geodesic_cosine requires unit vectors");
  }
  return std::clamp(p.dot(q), -1.0, 1.0);
}

}  // namespace spherecov
