#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"

namespace sphereprox {

int default_tail_start(std::size_t n_points) {
  return static_cast<int>(n_points / 2);
}

namespace {

void require_grid_setup(const AdmissibleSpace& space, double resolution) {
  if (space.ambient_dim() != 3)
    throw NotImplementedError("grid search needs ambient dimension 3");
  if (!(resolution >= kMinOracleResolution &&
        resolution <= kMaxOracleResolution))
    throw InvalidInputError("grid resolution out of range");
}

// Collapse near-coincident points; weights (when given) accumulate onto the
// cluster representative. Convergent orbits collapse to a handful of
// clusters, which keeps the grid scans cheap.
struct Clustered {
  std::vector<Point> points;
  std::vector<double> weights;
};

Clustered cluster_points(const std::vector<Point>& pts,
                         const std::vector<double>* weights, double tol) {
  Clustered out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    bool merged = false;
    for (std::size_t j = 0; j < out.points.size(); ++j) {
      if (distance(out.points[j], pts[i]) <= tol) {
        out.weights[j] += w;
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.points.push_back(pts[i]);
      out.weights.push_back(w);
    }
  }
  return out;
}

// Best grid node (plus explicit candidates), then a golden-section local
// refinement. The candidates matter: a constant sequence's center is the
// point itself, which no grid node hits exactly.
Point minimize_over_space(
    const AdmissibleSpace& space, double resolution,
    const std::vector<Point>& candidates,
    const std::function<double(const Point&)>& objective) {
  Point best = space.pole();
  double best_value = objective(best);
  const auto consider = [&](const Point& p) {
    const double v = objective(p);
    if (v < best_value) {
      best_value = v;
      best = p;
    }
  };
  for (const Point& c : candidates) consider(c);
  for_each_cap_node(space, resolution, consider);
  return line_search_refine(objective, space, best, resolution,
                            kRefinementStepMin);
}

}  // namespace

AsymptoticCenterEstimate asymptotic_center(const std::vector<Point>& points,
                                           int tail_start,
                                           const AdmissibleSpace& space,
                                           double resolution) {
  require_grid_setup(space, resolution);
  if (tail_start < 0)
    throw InvalidInputError("tail_start must be nonnegative");
  if (points.size() < static_cast<std::size_t>(tail_start) + 10)
    throw InvalidInputError(
        "asymptotic center needs a tail of at least 10 points");
  const std::vector<Point> tail(points.begin() + tail_start, points.end());
  for (const Point& p : tail)
    if (!space.contains(p))
      throw InvalidInputError("tail point lies outside the space");

  const Clustered cl = cluster_points(tail, nullptr, 1e-9);
  const auto tail_radius = [&](const Point& y) {
    double worst = 0.0;
    for (const Point& p : cl.points) worst = std::max(worst, distance(y, p));
    return worst;
  };
  Point center = minimize_over_space(space, resolution, cl.points, tail_radius);
  const double radius = tail_radius(center);
  return {std::move(center), radius, tail_start, resolution};
}

BoundednessCertificate boundedness_certificate(const IterationTrace& trace,
                                               int tail_start,
                                               const AdmissibleSpace& space,
                                               double resolution) {
  if (trace.step_records.empty())
    throw InvalidInputError("certificate needs a trace with recorded steps");
  const AsymptoticCenterEstimate ac =
      asymptotic_center(trace.resolvent_points, tail_start, space, resolution);
  double sup_step = 0.0;
  for (const StepRecord& r : trace.step_records)
    sup_step = std::max(sup_step, r.step_distance);
  BoundednessCertificate cert;
  cert.tail_inf_sup = ac.radius_estimate;
  cert.spherically_bounded_estimate =
      ac.radius_estimate < kPi / 2.0 - kBoundednessMargin;
  cert.sup_step_distance = sup_step;
  cert.tail_start = tail_start;
  return cert;
}

GFunctionEstimate g_maximizer(const std::vector<Point>& resolvent_points,
                              const std::vector<double>& beta_weights,
                              const AdmissibleSpace& space,
                              double resolution) {
  require_grid_setup(space, resolution);
  if (resolvent_points.size() < 10)
    throw InvalidInputError(
        "averaged-cosine estimate needs at least 10 points");
  if (beta_weights.size() != resolvent_points.size())
    throw InvalidInputError("one weight per point required");
  for (double b : beta_weights)
    if (!(std::isfinite(b) && b > 0.0))
      throw InvalidInputError("weights must be positive and finite");
  for (const Point& z : resolvent_points)
    if (!space.contains(z))
      throw InvalidInputError("point lies outside the space");

  std::vector<double> sigma(beta_weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < beta_weights.size(); ++i) {
    run += beta_weights[i];
    sigma[i] = run;
  }
  const double total = run;

  const Clustered cl = cluster_points(resolvent_points, &beta_weights, 1e-9);
  const auto g = [&](const Point& y) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cl.points.size(); ++j)
      acc += cl.weights[j] * cos_distance(y, cl.points[j]);
    return acc / total;
  };
  const Point maximizer = minimize_over_space(
      space, resolution, cl.points, [&](const Point& y) { return -g(y); });
  const double value = g(maximizer);

  // Sampled self-check: an average of cosines of distances contracts no
  // faster than the distance itself.
  Rng rng(20290117u);
  for (int i = 0; i < 64; ++i) {
    const Point a = sample_in_ball(space, rng);
    const Point b = sample_in_ball(space, rng);
    if (std::abs(g(a) - g(b)) > distance(a, b) + 1e-10) {
      const Vec& c = maximizer.coords();
      throw ConvergenceFailureError(
          "averaged cosine violated its Lipschitz bound",
          std::vector<double>(c.data(), c.data() + c.size()));
    }
  }
  return {beta_weights, std::move(sigma), maximizer, value};
}

std::vector<double> g_weights_from_trace(const IterationTrace& trace) {
  if (trace.step_records.empty())
    throw InvalidInputError("trace has no recorded steps");
  std::vector<double> betas;
  betas.reserve(trace.step_records.size());
  for (const StepRecord& r : trace.step_records) {
    const double c = std::cos(r.step_distance);
    betas.push_back((1.0 - r.alpha) * r.lambda * c * c / (1.0 + c * c));
  }
  return betas;
}

TraceInequalityReport check_trace_inequalities(const IterationTrace& trace,
                                               const ConvexFunction& f,
                                               const Point& u) {
  const std::size_t steps = trace.step_records.size();
  if (steps == 0) throw InvalidInputError("trace has no recorded steps");
  if (trace.resolvent_points.size() != steps ||
      trace.iterates.size() != steps + 1)
    throw InvalidInputError("trace length bookkeeping is inconsistent");
  if (!f.space().contains(u))
    throw InvalidInputError("reference minimizer lies outside the space");
  const bool anchored = trace.scheme == SchemeKind::halpern;
  if (anchored && !trace.anchor)
    throw InvalidInputError("anchored trace is missing its anchor");

  TraceInequalityReport rep;
  rep.quasi_firm.reserve(steps);
  rep.cosine_update.reserve(steps);
  rep.fejer.reserve(steps);
  if (anchored) rep.proximal_chain.reserve(steps);

  for (std::size_t i = 0; i < steps; ++i) {
    const Point& x = trace.iterates[i];
    const Point& next = trace.iterates[i + 1];
    const Point& z = trace.resolvent_points[i];
    const double alpha = trace.step_records[i].alpha;
    const double cu_x = cos_distance(u, x);
    const double cu_z = cos_distance(u, z);

    rep.quasi_firm.push_back(cos_distance(z, x) * cu_z - cu_x);

    const double cu_base = anchored ? cos_distance(u, *trace.anchor) : cu_x;
    rep.cosine_update.push_back(cos_distance(u, next) -
                                (alpha * cu_base + (1.0 - alpha) * cu_z));

    if (anchored) {
      const double du_y = distance(u, x);
      rep.fejer.push_back(std::max(distance(u, *trace.anchor), du_y) -
                          distance(u, next));
      rep.proximal_chain.push_back(
          du_y - std::max(distance(u, z), distance(z, x)));
    } else {
      rep.fejer.push_back(distance(u, x) - distance(u, next));
    }
  }

  double worst = std::numeric_limits<double>::infinity();
  for (const auto* list :
       {&rep.quasi_firm, &rep.cosine_update, &rep.fejer, &rep.proximal_chain})
    for (double r : *list) worst = std::min(worst, r);
  rep.min_residual = worst;
  rep.pass = worst >= -1e-8;
  return rep;
}

}  // namespace sphereprox
