#ifndef SPHEREPROX_CONVEX_FUNCTION_HPP
#define SPHEREPROX_CONVEX_FUNCTION_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "core/geometry.hpp"

namespace sphereprox {

struct Ball {
  Point center;
  double radius;
};

enum class FunctionKind {
  neg_cos_distance,
  weighted_neg_cos,
  max_neg_cos,
  indicator_ball,
  sum,
};

const char* to_string(FunctionKind kind);

// Geodesically convex objectives on an admissible ball. Negative-cosine
// terms are stored shifted by +1 (value 1 - cos d instead of -cos d) so that
// finite values are nonnegative; value_shift() reports the offset for code
// that needs the unshifted convention. Every instance is proper and lower
// semicontinuous by construction.
class ConvexFunction {
 public:
  // 1 - cos d(y, anchor). Minimizer: the anchor.
  static ConvexFunction neg_cos_distance(AdmissibleSpace space, Point anchor);

  // sum_i w_i (1 - cos d(y, a_i)), w_i > 0. Minimizer: the normalized
  // weighted coordinate sum of the anchors (stays in the ball).
  static ConvexFunction weighted_neg_cos(AdmissibleSpace space,
                                         std::vector<Point> anchors,
                                         std::vector<double> weights);

  // max_i (1 - cos d(y, a_i)). Nonsmooth along equidistance sets. For two
  // anchors the minimizer is their geodesic midpoint; otherwise no closed
  // form is certified here.
  static ConvexFunction max_neg_cos(AdmissibleSpace space,
                                    std::vector<Point> anchors);

  // 0 on the closed ball B(center, radius), +inf elsewhere in the space.
  // The ball must sit inside the space.
  static ConvexFunction indicator_ball(AdmissibleSpace space, Point center,
                                       double radius);

  // Sum of addends over a common space. Rejected if no common finite point
  // can be exhibited (e.g. disjoint indicator balls).
  static ConvexFunction sum(AdmissibleSpace space,
                            std::vector<ConvexFunction> addends);

  FunctionKind kind() const { return kind_; }
  const AdmissibleSpace& space() const { return space_; }

  // Value at y, +inf outside indicator balls. y outside the space is a
  // domain error, not +inf.
  double evaluate(const Point& y) const;

  // Stored value minus the unshifted (-cos) convention, a constant.
  double value_shift() const { return shift_; }

  // Steepest-descent direction (negative Riemannian gradient) at y, in the
  // tangent space at y. Unavailable (nullopt) iff an indicator constituent
  // is present. For the max kind this is the active term's direction, ties
  // broken toward the smallest anchor index, which is a subgradient-descent
  // direction away from tie points.
  std::optional<Vec> descent_direction(const Point& y) const;

  // Pieces for solvers that separate smooth cost from constraints: descent
  // direction and value of everything except indicator terms (max terms
  // contribute their active-term subgradient), plus the indicator balls.
  Vec smooth_descent_direction(const Point& y) const;
  double smooth_value(const Point& y) const;
  const std::vector<Ball>& constraint_balls() const { return balls_; }
  bool has_indicator() const { return !balls_.empty(); }
  bool has_max_part() const { return has_max_; }

  // A certified global minimizer over the space, when the structure gives
  // one away. Indicator balls minimize on the whole ball and return nullopt
  // here; their Argmin is constraint_balls().front().
  const std::optional<Point>& known_minimizer() const { return known_min_; }

  const std::vector<Point>& anchors() const { return anchors_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ConvexFunction>& addends() const { return addends_; }

  // Construction from the experiment-config JSON shape {"kind": ..., ...}.
  static ConvexFunction from_json(const AdmissibleSpace& space,
                                  const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  ConvexFunction(FunctionKind kind, AdmissibleSpace space);

  double evaluate_impl(const Point& y) const;

  FunctionKind kind_;
  AdmissibleSpace space_;
  std::vector<Point> anchors_;
  std::vector<double> weights_;
  std::vector<Ball> balls_;  // own ball for indicator; union of children for sum
  std::vector<ConvexFunction> addends_;
  std::optional<Point> known_min_;
  double shift_ = 0.0;
  bool has_max_ = false;
};

// Nearest point of the intersection of the space with the given balls,
// approximated by cyclic projection from p. nullopt when the iteration
// fails to reach a common point (treat as empty intersection).
std::optional<Point> project_to_balls(const AdmissibleSpace& space,
                                      const Point& p,
                                      const std::vector<Ball>& balls);

// Parses a unit point from a JSON coordinate array (normalizing input),
// checking the dimension when expected_dim > 0. Throws ConfigError.
Point point_from_json(const nlohmann::json& a, int expected_dim);

}  // namespace sphereprox

#endif
