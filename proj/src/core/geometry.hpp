#ifndef SPHEREPROX_GEOMETRY_HPP
#define SPHEREPROX_GEOMETRY_HPP

#include <Eigen/Core>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace sphereprox {

using Vec = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Unit-norm tolerance accepted by the Point constructor. Operations that
// build new points renormalize, so drift never accumulates past this.
inline constexpr double kUnitTol = 1e-12;

// Distances above this are treated as antipodal: the connecting geodesic is
// no longer unique and interpolation/projection refuse to pick one.
inline constexpr double kAntipodalThreshold = kPi - 1e-8;

// A point of the model space: unit vector in R^n, n >= 2. The geodesic
// distance between two points is the angle between them.
class Point {
 public:
  explicit Point(Vec coords);

  // Normalizes first; rejects (near-)zero input.
  static Point from_unnormalized(Vec coords);

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

  bool same_coords(const Point& other) const {
    return coords_.size() == other.coords_.size() && coords_ == other.coords_;
  }

 private:
  Vec coords_;
};

// Geodesic (great-circle) distance, in [0, pi]. Mathematically this is
// arccos<x,y>, but it is evaluated as atan2(||y - <x,y>x||, <x,y>) so that
// nearby points keep full relative accuracy instead of the ~1e-8 floor the
// arccos form has near 0.
double distance(const Point& x, const Point& y);

// cos(distance(x, y)) up to one ulp: the inner product clamped to [-1, 1].
// Cheap form for hot loops that only need cosines.
double cos_distance(const Point& x, const Point& y);

// Point at arc length t from x along the unique geodesic toward y.
// Requires 0 <= t <= distance(x, y) and a non-antipodal pair.
Point point_toward(const Point& x, const Point& y, double t);

// Geodesic convex combination alpha*x (+) (1-alpha)*y: the point at arc
// length (1-alpha)*d(x,y) from x toward y. alpha = 1 returns x itself and
// alpha = 0 returns y itself (bitwise, so callers can detect fixed points).
Point interpolate(const Point& x, const Point& y, double alpha);

// Tangent vector v at base with exp_map(base, v) = target and
// ||v|| = distance(base, target). Zero vector when target == base.
Vec log_map(const Point& base, const Point& target);

// Geodesic exponential: walk arc length ||tangent|| from base in direction
// tangent. Requires tangent orthogonal to base (within 1e-9 relative) and
// ||tangent|| < pi.
Point exp_map(const Point& base, const Vec& tangent);

// The geodesic arc between two fixed points, with its length cached.
// Endpoints may coincide (length 0); antipodal pairs are rejected.
class GeodesicSegment {
 public:
  GeodesicSegment(Point a, Point b);

  const Point& start() const { return a_; }
  const Point& end() const { return b_; }
  double length() const { return length_; }

  // Point at arc length t from the start, 0 <= t <= length().
  Point point_at(double t) const;

 private:
  Point a_;
  Point b_;
  double length_;
};

// Default ball radius: as large as admissibility allows, minus a margin so
// that boundary arithmetic never sits exactly on the threshold.
inline constexpr double kMaxBallRadius = kPi / 4.0;
inline constexpr double kDefaultBallRadius = kPi / 4.0 - 0.01;

// Closed geodesic ball around a pole with radius < pi/4. Any two points of
// the ball are closer than pi/2, which is the admissibility property every
// routine in this library leans on: cosines of distances stay positive and
// geodesics between members are unique and stay inside.
class AdmissibleSpace {
 public:
  AdmissibleSpace(Point pole, double radius);

  static AdmissibleSpace with_default_radius(Point pole) {
    return AdmissibleSpace(std::move(pole), kDefaultBallRadius);
  }

  const Point& pole() const { return pole_; }
  double radius() const { return radius_; }
  int ambient_dim() const { return pole_.dim(); }

  // Membership with a 1e-12 slack so renormalized boundary points pass.
  bool contains(const Point& p) const;

  // Metric projection onto the ball: p itself when inside, otherwise the
  // point at arc length radius() from the pole toward p. Rejects points
  // (near-)antipodal to the pole, where the projection is not unique.
  Point project(const Point& p) const;

 private:
  Point pole_;
  double radius_;
};

// Uniform sample from the ball (uniform w.r.t. surface measure): uniform
// tangent direction at the pole plus a radius drawn from the cap density
// sin^{n-2}(t) on [0, radius].
Point sample_in_ball(const AdmissibleSpace& space, Rng& rng);

// Uniform unit tangent vector at base.
Vec sample_unit_tangent(const Point& base, Rng& rng);

// Residuals (lhs - rhs, nonnegative up to rounding when all points lie in a
// common admissible ball) of the three spherical comparison inequalities
// that drive every convergence argument in this library. m denotes the
// combination alpha*x1 (+) (1-alpha)*x2 and l = d(x1, x2).

// cos d(m, x3) >= alpha cos d(x1, x3) + (1-alpha) cos d(x2, x3)
double cos_combination_residual(const Point& x1, const Point& x2,
                                const Point& x3, double alpha);

// cos d(m, x3) sin l >= cos d(x1, x3) sin(alpha l) + cos d(x2, x3) sin((1-alpha) l)
double sine_comparison_residual(const Point& x1, const Point& x2,
                                const Point& x3, double alpha);

// cos d(m, x3) >= (1-beta) cos d(x2, x3)
//                 + beta cos d(x1, x3) / (sin l tan(alpha l / 2) + cos l)
// with beta = 1 - sin((1-alpha) l)/sin l (beta = alpha when x1 == x2).
double half_angle_comparison_residual(const Point& x1, const Point& x2,
                                      const Point& x3, double alpha);

}  // namespace sphereprox

#endif
