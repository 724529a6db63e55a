#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sphereprox {

namespace {

void require_same_dim(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) {
    throw DimensionMismatchError("points live in different ambient dimensions");
  }
}

// Component of y orthogonal to x, i.e. y - <x,y>x. Its norm equals
// sin(distance(x, y)) for unit x, y.
Vec rejection(const Point& x, const Point& y, double dot) {
  return y.coords() - dot * x.coords();
}

}  // namespace

Point::Point(Vec coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw InvalidInputError("points need ambient dimension >= 2");
  }
  if (!coords_.allFinite()) {
    throw InvalidInputError("point coordinates must be finite");
  }
  if (std::abs(coords_.norm() - 1.0) > kUnitTol) {
    throw InvalidInputError("point coordinates must have unit norm");
  }
}

Point Point::from_unnormalized(Vec coords) {
  if (coords.size() < 2) {
    throw InvalidInputError("points need ambient dimension >= 2");
  }
  if (!coords.allFinite()) {
    throw InvalidInputError("point coordinates must be finite");
  }
  const double n = coords.norm();
  if (n < 1e-300) {
    throw InvalidInputError("cannot normalize a zero vector to a point");
  }
  return Point(Vec(coords / n));
}

double distance(const Point& x, const Point& y) {
  require_same_dim(x, y);
  const double dot = x.coords().dot(y.coords());
  const double s = rejection(x, y, dot).norm();
  return std::atan2(s, dot);
}

double cos_distance(const Point& x, const Point& y) {
  // cos(distance(...)) rather than the raw inner product, so the value is
  // exactly consistent with the metric and exactly 1 at coincident points.
  return std::cos(distance(x, y));
}

Point point_toward(const Point& x, const Point& y, double t) {
  require_same_dim(x, y);
  const double dot = x.coords().dot(y.coords());
  const Vec rej = rejection(x, y, dot);
  const double s = rej.norm();
  const double d = std::atan2(s, dot);
  if (!(t >= 0.0) || t > d + 1e-12) {
    throw InvalidInputError("arc length outside [0, d(x,y)]");
  }
  if (t == 0.0) return x;
  if (d > kAntipodalThreshold) {
    throw DegenerateGeodesicError("geodesic between near-antipodal points is not unique");
  }
  // s > 0 here: t > 0 forces d > 0.
  const Vec dir = rej / s;
  return Point::from_unnormalized(std::cos(t) * x.coords() + std::sin(t) * dir);
}

Point interpolate(const Point& x, const Point& y, double alpha) {
  require_same_dim(x, y);
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidInputError("interpolation weight must lie in [0, 1]");
  }
  // Exact endpoints are returned bitwise so iteration traces freeze exactly
  // once they converge instead of jittering at rounding scale.
  if (alpha == 1.0) return x;
  if (alpha == 0.0) return y;
  const double d = distance(x, y);
  if (d > kAntipodalThreshold) {
    throw DegenerateGeodesicError("cannot interpolate between near-antipodal points");
  }
  if (d < 1e-15) return x;
  return point_toward(x, y, (1.0 - alpha) * d);
}

Vec log_map(const Point& base, const Point& target) {
  require_same_dim(base, target);
  const double dot = base.coords().dot(target.coords());
  const Vec rej = rejection(base, target, dot);
  const double s = rej.norm();
  const double d = std::atan2(s, dot);
  if (d > kAntipodalThreshold) {
    throw DegenerateGeodesicError("log map undefined at near-antipodal points");
  }
  if (d < 1e-15) return Vec::Zero(base.dim());
  return (d / s) * rej;
}

Point exp_map(const Point& base, const Vec& tangent) {
  if (tangent.size() != base.dim()) {
    throw DimensionMismatchError("tangent vector has wrong ambient dimension");
  }
  const double t = tangent.norm();
  if (t == 0.0) return base;
  if (!(t < kPi)) {
    throw InvalidInputError("tangent norm must be < pi");
  }
  if (std::abs(base.coords().dot(tangent)) > 1e-9 * std::max(1.0, t)) {
    throw InvalidInputError("tangent vector is not orthogonal to its base point");
  }
  return Point::from_unnormalized(std::cos(t) * base.coords() +
                                  (std::sin(t) / t) * tangent);
}

GeodesicSegment::GeodesicSegment(Point a, Point b)
    : a_(std::move(a)), b_(std::move(b)), length_(distance(a_, b_)) {
  if (length_ > kAntipodalThreshold) {
    throw DegenerateGeodesicError("segment endpoints are near-antipodal");
  }
}

Point GeodesicSegment::point_at(double t) const {
  if (!(t >= 0.0) || t > length_ + 1e-12) {
    throw InvalidInputError("arc length outside the segment");
  }
  if (length_ == 0.0 || t == 0.0) return a_;
  return point_toward(a_, b_, std::min(t, length_));
}

AdmissibleSpace::AdmissibleSpace(Point pole, double radius)
    : pole_(std::move(pole)), radius_(radius) {
  if (!(radius > 0.0) || !(radius < kMaxBallRadius)) {
    throw InvalidInputError("ball radius must lie in (0, pi/4)");
  }
}

bool AdmissibleSpace::contains(const Point& p) const {
  return distance(pole_, p) <= radius_ + 1e-12;
}

Point AdmissibleSpace::project(const Point& p) const {
  const double d = distance(pole_, p);
  if (d <= radius_) return p;
  if (d > kAntipodalThreshold) {
    throw DegenerateGeodesicError("projection of a near-antipodal point is not unique");
  }
  return point_toward(pole_, p, radius_);
}

Point sample_in_ball(const AdmissibleSpace& space, Rng& rng) {
  const int n = space.ambient_dim();
  const double r = space.radius();
  // Radius density on the cap is proportional to sin^{n-2}(t), t in [0, r].
  // Rejection against the flat envelope sin^{n-2}(r); fine for r < pi/4.
  const double env = std::pow(std::sin(r), n - 2);
  double t = 0.0;
  for (;;) {
    t = rng.uniform(0.0, r);
    const double accept = std::pow(std::sin(t), n - 2) / env;
    if (rng.uniform() <= accept) break;
  }
  if (t < 1e-15) return space.pole();
  return exp_map(space.pole(), t * sample_unit_tangent(space.pole(), rng));
}

Vec sample_unit_tangent(const Point& base, Rng& rng) {
  for (;;) {
    Vec g = rng.gaussian(base.dim());
    g -= base.coords().dot(g) * base.coords();
    const double n = g.norm();
    if (n > 1e-9) return g / n;
  }
}

double cos_combination_residual(const Point& x1, const Point& x2,
                                const Point& x3, double alpha) {
  const Point m = interpolate(x1, x2, alpha);
  return cos_distance(m, x3) - alpha * cos_distance(x1, x3) -
         (1.0 - alpha) * cos_distance(x2, x3);
}

double sine_comparison_residual(const Point& x1, const Point& x2,
                                const Point& x3, double alpha) {
  const Point m = interpolate(x1, x2, alpha);
  const double l = distance(x1, x2);
  return cos_distance(m, x3) * std::sin(l) -
         cos_distance(x1, x3) * std::sin(alpha * l) -
         cos_distance(x2, x3) * std::sin((1.0 - alpha) * l);
}

double half_angle_comparison_residual(const Point& x1, const Point& x2,
                                      const Point& x3, double alpha) {
  const Point m = interpolate(x1, x2, alpha);
  const double l = distance(x1, x2);
  const double sl = std::sin(l);
  const double beta = sl > 0.0 ? 1.0 - std::sin((1.0 - alpha) * l) / sl : alpha;
  const double denom = sl * std::tan(alpha * l / 2.0) + std::cos(l);
  return cos_distance(m, x3) - (1.0 - beta) * cos_distance(x2, x3) -
         beta * cos_distance(x1, x3) / denom;
}

}  // namespace sphereprox
