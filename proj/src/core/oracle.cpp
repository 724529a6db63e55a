#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "core/scalar_min.hpp"

namespace sphereprox {

namespace {

constexpr double kGoldenAngle = 2.399963229728653322;  // pi (3 - sqrt 5)

// Retraction onto the constraint balls of f, if it has any. Keeps the
// polish able to slide along active ball boundaries.
std::function<Point(const Point&)> ball_retraction(
    const ConvexFunction& f, const AdmissibleSpace& space) {
  if (!f.has_indicator()) return {};
  return [&f, &space](const Point& q) {
    auto p = project_to_balls(space, q, f.constraint_balls());
    return p ? *p : q;
  };
}

void require_grid_supported(const AdmissibleSpace& space, double resolution) {
  if (space.ambient_dim() != 3) {
    throw NotImplementedError("grid oracles are implemented for 3d ambient space only");
  }
  if (!(resolution >= kMinOracleResolution) ||
      !(resolution <= kMaxOracleResolution)) {
    throw InvalidInputError("grid resolution must lie in [1e-4, 1e-1]");
  }
}

// Orthonormal frame spanning the tangent space at y (columns 1..n-1 of the
// Householder QR of y as a single column).
Eigen::MatrixXd tangent_frame(const Point& y) {
  const int n = y.dim();
  Eigen::MatrixXd col = y.coords();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(col);
  Eigen::MatrixXd q = qr.householderQ();
  // First column of q is +-y; the rest span the tangent space.
  return q.rightCols(n - 1);
}

}  // namespace

long cap_node_count(const AdmissibleSpace& space, double resolution) {
  require_grid_supported(space, resolution);
  const double area = 2.0 * kPi * (1.0 - std::cos(space.radius()));
  return std::max(64L, static_cast<long>(std::ceil(area / (resolution * resolution))));
}

void for_each_cap_node(const AdmissibleSpace& space, double resolution,
                       const std::function<void(const Point&)>& visit) {
  const long n = cap_node_count(space, resolution);
  const Vec& p = space.pole().coords();
  Vec seed = std::abs(p[0]) < 0.9 ? Vec(Vec::Unit(3, 0)) : Vec(Vec::Unit(3, 1));
  const Vec e1 = (seed - p.dot(seed) * p).normalized();
  Vec e2(3);
  e2[0] = p[1] * e1[2] - p[2] * e1[1];
  e2[1] = p[2] * e1[0] - p[0] * e1[2];
  e2[2] = p[0] * e1[1] - p[1] * e1[0];
  const double depth = 1.0 - std::cos(space.radius());
  for (long k = 0; k < n; ++k) {
    const double frac = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    const double t = std::acos(1.0 - frac * depth);
    const double th = kGoldenAngle * static_cast<double>(k);
    Vec v = std::cos(t) * p + std::sin(t) * (std::cos(th) * e1 + std::sin(th) * e2);
    visit(Point::from_unnormalized(std::move(v)));
  }
}

std::vector<Point> cap_grid(const AdmissibleSpace& space, double resolution) {
  const long n = cap_node_count(space, resolution);
  if (n > 3000000L) {
    throw InvalidInputError("resolution too fine to materialize; use for_each_cap_node");
  }
  std::vector<Point> out;
  out.reserve(static_cast<size_t>(n));
  for_each_cap_node(space, resolution,
                    [&](const Point& q) { out.push_back(q); });
  return out;
}

Point line_search_refine(const std::function<double(const Point&)>& objective,
                         const AdmissibleSpace& space, Point start,
                         double step0, double step_min,
                         const std::function<Point(const Point&)>& retract) {
  if (!(step0 > 0.0) || !(step_min > 0.0) || step0 < step_min) {
    throw InvalidInputError("need step0 >= step_min > 0");
  }
  Point y = space.project(start);
  if (retract) y = retract(y);
  double v = objective(y);
  const double cos_r = std::cos(space.radius());
  double step = step0;
  double rot = 0.0;
  int sweeps_at_level = 0;
  int stalled_sweeps = 0;

  // Exact line search from y along dir; accepts the move if it improves.
  const auto try_direction = [&](Vec dir) -> bool {
    // Re-orthogonalize against the current point. Retractions move y off the
    // great circle the frame was built on, so frame columns go slightly
    // stale within a sweep.
    dir -= y.coords().dot(dir) * y.coords();
    const double nrm = dir.norm();
    if (nrm < 1e-8) return false;
    dir /= nrm;
    const auto candidate = [&](double t) {
      Point q = exp_map(y, t * dir);
      return retract ? retract(q) : q;
    };
    const auto section = [&](double t) {
      return t == 0.0 ? v : objective(candidate(t));
    };
    // Feasible parameter range keeping exp(y, t dir) inside the ball:
    // <c(t), pole> = A cos t + B sin t >= cos(radius).
    const double a_dot = y.coords().dot(space.pole().coords());
    const double b_dot = dir.dot(space.pole().coords());
    const double m = std::hypot(a_dot, b_dot);
    const double phase = std::atan2(b_dot, a_dot);
    double delta = 0.0;
    if (m > cos_r) delta = std::acos(std::clamp(cos_r / m, -1.0, 1.0));
    const double feas_lo = phase - delta;
    const double feas_hi = phase + delta;
    double span = 4.0 * step;
    double best_t = 0.0;
    double best_v = v;
    for (int grow = 0; grow < 24; ++grow) {
      double lo = std::max(-span, feas_lo);
      double hi = std::min(span, feas_hi);
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
      if (hi - lo < step * 1e-6) return false;
      const double t = scan_then_golden(section, lo, hi, 9, step * 1e-3);
      const double vt = section(t);
      if (vt < best_v) {
        best_v = vt;
        best_t = t;
      }
      // Widen the window while an improving minimizer sits at a span-limited
      // edge; lets pattern moves cover long valley runs in one call.
      const double edge = 0.051 * (hi - lo);
      const bool hit_hi = span < feas_hi && t >= hi - edge;
      const bool hit_lo = -span > feas_lo && t <= lo + edge;
      if (vt < v && (hit_hi || hit_lo)) {
        span *= 4.0;
        continue;
      }
      break;
    }
    if (best_v < v) {
      y = candidate(best_t);
      v = best_v;
      return true;
    }
    return false;
  };

  while (step >= step_min) {
    Eigen::MatrixXd frame = tangent_frame(y);
    // Rotate the first two frame directions so stall directions change
    // from sweep to sweep; matters for valley-shaped (max-type) objectives.
    if (frame.cols() >= 2) {
      const Eigen::VectorXd b1 = frame.col(0);
      const Eigen::VectorXd b2 = frame.col(1);
      frame.col(0) = std::cos(rot) * b1 + std::sin(rot) * b2;
      frame.col(1) = -std::sin(rot) * b1 + std::cos(rot) * b2;
    }
    const Point sweep_base = y;
    bool improved = false;
    for (int c = 0; c < frame.cols(); ++c) {
      improved = try_direction(frame.col(c)) || improved;
    }
    // Pattern move: continue along the direction this sweep travelled.
    if (improved && distance(y, sweep_base) > 1e-14) {
      improved = try_direction(-log_map(y, sweep_base)) || improved;
    }
    rot += kGoldenAngle;
    ++sweeps_at_level;
    stalled_sweeps = improved ? 0 : stalled_sweeps + 1;
    if (stalled_sweeps >= 2 || sweeps_at_level > 60) {
      step *= 0.5;
      sweeps_at_level = 0;
      stalled_sweeps = 0;
    }
  }
  return y;
}

Point brute_force_minimizer(const ConvexFunction& f,
                            const AdmissibleSpace& space, double resolution) {
  require_grid_supported(space, resolution);
  double best_v = std::numeric_limits<double>::infinity();
  std::optional<Point> best;
  for_each_cap_node(space, resolution, [&](const Point& q) {
    const double v = f.evaluate(q);
    if (v < best_v) {
      best_v = v;
      best = q;
    }
  });
  if (!best && f.has_indicator()) {
    // Constraint ball finer than the grid: seed from the feasible set.
    best = project_to_balls(space, space.pole(), f.constraint_balls());
    if (best) best_v = f.evaluate(*best);
  }
  if (!best || !std::isfinite(best_v)) {
    throw DomainError("objective has no finite value on the grid");
  }
  return line_search_refine([&](const Point& q) { return f.evaluate(q); },
                            space, *best, resolution, 1e-9,
                            ball_retraction(f, space));
}

std::vector<Point> brute_force_argmin_set(const ConvexFunction& f,
                                          const AdmissibleSpace& space,
                                          double resolution, double value_tol) {
  require_grid_supported(space, resolution);
  double vmin = std::numeric_limits<double>::infinity();
  for_each_cap_node(space, resolution, [&](const Point& q) {
    vmin = std::min(vmin, f.evaluate(q));
  });
  if (!std::isfinite(vmin)) {
    throw DomainError("objective has no finite value on the grid");
  }
  std::vector<Point> reps;
  for_each_cap_node(space, resolution, [&](const Point& q) {
    if (f.evaluate(q) > vmin + value_tol) return;
    for (const Point& r : reps) {
      if (distance(r, q) < 3.0 * resolution) return;
    }
    if (reps.size() < 20000) reps.push_back(q);
  });
  std::vector<Point> out;
  const auto retract = ball_retraction(f, space);
  for (const Point& r : reps) {
    Point polished = line_search_refine(
        [&](const Point& q) { return f.evaluate(q); }, space, r, resolution,
        1e-9, retract);
    bool dup = false;
    for (const Point& o : out) {
      if (distance(o, polished) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(polished));
  }
  return out;
}

}  // namespace sphereprox
