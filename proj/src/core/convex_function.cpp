#include "core/convex_function.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace sphereprox {

namespace {

void require_in_space(const AdmissibleSpace& space, const Point& p,
                      const char* what) {
  if (!space.contains(p)) {
    throw InvalidInputError(std::string(what) + " must lie in the space");
  }
}

void require_same_space(const AdmissibleSpace& a, const AdmissibleSpace& b) {
  if (!a.pole().same_coords(b.pole()) || a.radius() != b.radius()) {
    throw InvalidInputError("sum addends must share one space");
  }
}

// Direction of steepest descent of 1 - cos d(., anchor) at y: the unit
// tangent toward the anchor scaled by sin d. Zero at the anchor itself.
Vec neg_cos_descent(const Point& y, const Point& anchor) {
  const Vec v = log_map(y, anchor);
  const double d = v.norm();
  if (d < 1e-15) return Vec::Zero(y.dim());
  return (std::sin(d) / d) * v;
}

Point project_to_ball(const Ball& ball, const Point& p) {
  const double d = distance(ball.center, p);
  if (d <= ball.radius) return p;
  return point_toward(ball.center, p, ball.radius);
}

}  // namespace

const char* to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::neg_cos_distance: return "neg_cos_distance";
    case FunctionKind::weighted_neg_cos: return "weighted_neg_cos";
    case FunctionKind::max_neg_cos: return "max_neg_cos";
    case FunctionKind::indicator_ball: return "indicator_ball";
    case FunctionKind::sum: return "sum";
  }
  return "unknown";
}

ConvexFunction::ConvexFunction(FunctionKind kind, AdmissibleSpace space)
    : kind_(kind), space_(std::move(space)) {}

ConvexFunction ConvexFunction::neg_cos_distance(AdmissibleSpace space,
                                                Point anchor) {
  require_in_space(space, anchor, "anchor");
  ConvexFunction f(FunctionKind::neg_cos_distance, std::move(space));
  f.known_min_ = anchor;
  f.anchors_.push_back(std::move(anchor));
  f.weights_.push_back(1.0);
  f.shift_ = 1.0;
  return f;
}

ConvexFunction ConvexFunction::weighted_neg_cos(AdmissibleSpace space,
                                                std::vector<Point> anchors,
                                                std::vector<double> weights) {
  if (anchors.empty() || anchors.size() != weights.size()) {
    throw InvalidInputError("need one positive weight per anchor");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidInputError("weights must be positive and finite");
    }
  }
  for (const Point& a : anchors) require_in_space(space, a, "anchor");
  ConvexFunction f(FunctionKind::weighted_neg_cos, std::move(space));
  // The weighted coordinate sum normalizes to the unique minimizer: the
  // objective is sum(w_i) - <y, sum(w_i a_i)>, so it only depends on the
  // angle to that sum, which lies in the anchors' convex hull.
  Vec m = Vec::Zero(anchors[0].dim());
  double total = 0.0;
  for (size_t i = 0; i < anchors.size(); ++i) {
    m += weights[i] * anchors[i].coords();
    total += weights[i];
  }
  f.known_min_ = Point::from_unnormalized(m);
  f.anchors_ = std::move(anchors);
  f.weights_ = std::move(weights);
  f.shift_ = total;
  return f;
}

ConvexFunction ConvexFunction::max_neg_cos(AdmissibleSpace space,
                                           std::vector<Point> anchors) {
  if (anchors.empty()) {
    throw InvalidInputError("max_neg_cos needs at least one anchor");
  }
  for (const Point& a : anchors) require_in_space(space, a, "anchor");
  ConvexFunction f(FunctionKind::max_neg_cos, std::move(space));
  if (anchors.size() == 1) {
    f.known_min_ = anchors[0];
  } else if (anchors.size() == 2) {
    // Geodesic midpoint: the equidistance point on the connecting geodesic;
    // zero is in the subdifferential there and the function is convex.
    f.known_min_ = distance(anchors[0], anchors[1]) < 1e-15
                       ? anchors[0]
                       : interpolate(anchors[0], anchors[1], 0.5);
  }
  f.anchors_ = std::move(anchors);
  f.shift_ = 1.0;
  f.has_max_ = f.anchors_.size() > 1;
  return f;
}

ConvexFunction ConvexFunction::indicator_ball(AdmissibleSpace space,
                                              Point center, double radius) {
  require_in_space(space, center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInputError("indicator ball radius must be positive");
  }
  if (distance(space.pole(), center) + radius > space.radius() + 1e-12) {
    throw InvalidInputError("indicator ball must sit inside the space");
  }
  ConvexFunction f(FunctionKind::indicator_ball, std::move(space));
  f.balls_.push_back(Ball{std::move(center), radius});
  return f;
}

ConvexFunction ConvexFunction::sum(AdmissibleSpace space,
                                   std::vector<ConvexFunction> addends) {
  if (addends.empty()) {
    throw InvalidInputError("sum needs at least one addend");
  }
  ConvexFunction f(FunctionKind::sum, std::move(space));
  for (const ConvexFunction& a : addends) {
    require_same_space(f.space_, a.space());
    f.shift_ += a.shift_;
    f.has_max_ = f.has_max_ || a.has_max_;
    f.balls_.insert(f.balls_.end(), a.balls_.begin(), a.balls_.end());
  }
  f.addends_ = std::move(addends);

  // Properness: exhibit one common finite point. Cyclic projection from the
  // pole settles into the intersection of the constraint balls when there
  // is one.
  if (!f.balls_.empty()) {
    const auto feasible = project_to_balls(f.space_, f.space_.pole(), f.balls_);
    if (!feasible) {
      throw InvalidInputError("sum addends have no common finite point");
    }
  }

  // Certified minimizer when the smooth part is all neg-cos terms and at
  // most one indicator constrains it: the smooth part depends only on the
  // angle to the weighted anchor sum, so its constrained minimizer is the
  // ball projection of the normalized sum.
  bool certifiable = f.balls_.size() <= 1;
  Vec m = Vec::Zero(f.space_.pole().dim());
  bool any_smooth = false;
  const std::function<void(const ConvexFunction&)> gather =
      [&](const ConvexFunction& g) {
        switch (g.kind_) {
          case FunctionKind::neg_cos_distance:
          case FunctionKind::weighted_neg_cos:
            for (size_t i = 0; i < g.anchors_.size(); ++i) {
              m += g.weights_[i] * g.anchors_[i].coords();
            }
            any_smooth = true;
            break;
          case FunctionKind::max_neg_cos:
            certifiable = certifiable && g.anchors_.size() == 1;
            if (g.anchors_.size() == 1) {
              m += g.anchors_[0].coords();
              any_smooth = true;
            }
            break;
          case FunctionKind::indicator_ball:
            break;
          case FunctionKind::sum:
            for (const auto& c : g.addends_) gather(c);
            break;
        }
      };
  gather(f);
  if (certifiable && any_smooth) {
    Point smooth_min = Point::from_unnormalized(m);
    f.known_min_ = f.balls_.empty()
                       ? smooth_min
                       : project_to_ball(f.balls_.front(), smooth_min);
  }
  return f;
}

double ConvexFunction::evaluate(const Point& y) const {
  if (!space_.contains(y)) {
    throw DomainError("evaluation outside the admissible space");
  }
  return evaluate_impl(y);
}

double ConvexFunction::evaluate_impl(const Point& y) const {
  switch (kind_) {
    case FunctionKind::neg_cos_distance:
      return 1.0 - cos_distance(y, anchors_[0]);
    case FunctionKind::weighted_neg_cos: {
      double v = 0.0;
      for (size_t i = 0; i < anchors_.size(); ++i) {
        v += weights_[i] * (1.0 - cos_distance(y, anchors_[i]));
      }
      return v;
    }
    case FunctionKind::max_neg_cos: {
      double v = 0.0;
      for (const Point& a : anchors_) {
        v = std::max(v, 1.0 - cos_distance(y, a));
      }
      return v;
    }
    case FunctionKind::indicator_ball:
      return distance(balls_[0].center, y) <= balls_[0].radius + 1e-12
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
    case FunctionKind::sum: {
      double v = 0.0;
      for (const auto& a : addends_) v += a.evaluate_impl(y);
      return v;
    }
  }
  throw Error("unreachable function kind");
}

std::optional<Vec> ConvexFunction::descent_direction(const Point& y) const {
  if (!space_.contains(y)) {
    throw DomainError("descent direction requested outside the space");
  }
  if (has_indicator()) return std::nullopt;
  return smooth_descent_direction(y);
}

Vec ConvexFunction::smooth_descent_direction(const Point& y) const {
  switch (kind_) {
    case FunctionKind::neg_cos_distance:
      return neg_cos_descent(y, anchors_[0]);
    case FunctionKind::weighted_neg_cos: {
      Vec g = Vec::Zero(y.dim());
      for (size_t i = 0; i < anchors_.size(); ++i) {
        g += weights_[i] * neg_cos_descent(y, anchors_[i]);
      }
      return g;
    }
    case FunctionKind::max_neg_cos: {
      size_t active = 0;
      double best = -1.0;
      for (size_t i = 0; i < anchors_.size(); ++i) {
        const double v = 1.0 - cos_distance(y, anchors_[i]);
        if (v > best) {
          best = v;
          active = i;
        }
      }
      return neg_cos_descent(y, anchors_[active]);
    }
    case FunctionKind::indicator_ball:
      return Vec::Zero(y.dim());
    case FunctionKind::sum: {
      Vec g = Vec::Zero(y.dim());
      for (const auto& a : addends_) g += a.smooth_descent_direction(y);
      return g;
    }
  }
  throw Error("unreachable function kind");
}

double ConvexFunction::smooth_value(const Point& y) const {
  switch (kind_) {
    case FunctionKind::indicator_ball:
      return 0.0;
    case FunctionKind::sum: {
      double v = 0.0;
      for (const auto& a : addends_) v += a.smooth_value(y);
      return v;
    }
    default:
      return evaluate_impl(y);
  }
}

std::optional<Point> project_to_balls(const AdmissibleSpace& space,
                                      const Point& p,
                                      const std::vector<Ball>& balls) {
  Point y = space.project(p);
  if (balls.empty()) return y;
  for (int iter = 0; iter < 200; ++iter) {
    bool moved = false;
    for (const Ball& b : balls) {
      if (distance(b.center, y) > b.radius + 1e-13) {
        y = point_toward(b.center, y, b.radius);
        moved = true;
      }
    }
    if (!moved) return y;
  }
  return std::nullopt;
}

Point point_from_json(const nlohmann::json& a, int expected_dim) {
  if (!a.is_array() || a.empty()) {
    throw ConfigError("expected a coordinate array");
  }
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ConfigError("coordinates must be numbers");
    v[i] = a[i].get<double>();
  }
  if (expected_dim > 0 && v.size() != expected_dim) {
    throw ConfigError("coordinate array has the wrong dimension");
  }
  return Point::from_unnormalized(std::move(v));
}

ConvexFunction ConvexFunction::from_json(const AdmissibleSpace& space,
                                         const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("function config needs a \"kind\" string");
  }
  const std::string kind = j["kind"].get<std::string>();
  const int dim = space.ambient_dim();
  try {
    if (kind == "neg_cos_distance") {
      if (!j.contains("anchor")) throw ConfigError("neg_cos_distance needs \"anchor\"");
      return neg_cos_distance(space, point_from_json(j["anchor"], dim));
    }
    if (kind == "weighted_neg_cos") {
      if (!j.contains("anchors") || !j.contains("weights") ||
          !j["anchors"].is_array() || !j["weights"].is_array()) {
        throw ConfigError("weighted_neg_cos needs \"anchors\" and \"weights\" arrays");
      }
      std::vector<Point> anchors;
      for (const auto& a : j["anchors"]) anchors.push_back(point_from_json(a, dim));
      std::vector<double> weights;
      for (const auto& w : j["weights"]) {
        if (!w.is_number()) throw ConfigError("weights must be numbers");
        weights.push_back(w.get<double>());
      }
      return weighted_neg_cos(space, std::move(anchors), std::move(weights));
    }
    if (kind == "max_neg_cos") {
      if (!j.contains("anchors") || !j["anchors"].is_array()) {
        throw ConfigError("max_neg_cos needs an \"anchors\" array");
      }
      std::vector<Point> anchors;
      for (const auto& a : j["anchors"]) anchors.push_back(point_from_json(a, dim));
      return max_neg_cos(space, std::move(anchors));
    }
    if (kind == "indicator_ball") {
      if (!j.contains("center") || !j.contains("radius") || !j["radius"].is_number()) {
        throw ConfigError("indicator_ball needs \"center\" and numeric \"radius\"");
      }
      return indicator_ball(space, point_from_json(j["center"], dim),
                            j["radius"].get<double>());
    }
    if (kind == "sum") {
      if (!j.contains("addends") || !j["addends"].is_array()) {
        throw ConfigError("sum needs an \"addends\" array");
      }
      std::vector<ConvexFunction> addends;
      for (const auto& a : j["addends"]) addends.push_back(from_json(space, a));
      return sum(space, std::move(addends));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("invalid function parameters: ") + e.what());
  }
  throw ConfigError("unknown function kind \"" + kind + "\"");
}

nlohmann::json ConvexFunction::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  const auto coords = [](const Point& p) {
    return std::vector<double>(p.coords().data(),
                               p.coords().data() + p.coords().size());
  };
  switch (kind_) {
    case FunctionKind::neg_cos_distance:
      j["anchor"] = coords(anchors_[0]);
      break;
    case FunctionKind::weighted_neg_cos: {
      nlohmann::json arr = nlohmann::json::array();
      for (const Point& a : anchors_) arr.push_back(coords(a));
      j["anchors"] = arr;
      j["weights"] = weights_;
      break;
    }
    case FunctionKind::max_neg_cos: {
      nlohmann::json arr = nlohmann::json::array();
      for (const Point& a : anchors_) arr.push_back(coords(a));
      j["anchors"] = arr;
      break;
    }
    case FunctionKind::indicator_ball:
      j["center"] = coords(balls_[0].center);
      j["radius"] = balls_[0].radius;
      break;
    case FunctionKind::sum: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& a : addends_) arr.push_back(a.to_json());
      j["addends"] = arr;
      break;
    }
  }
  return j;
}

}  // namespace sphereprox
