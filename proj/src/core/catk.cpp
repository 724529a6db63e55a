#include "core/catk.hpp"

#include <cmath>
#include <utility>

#include "core/errors.hpp"

namespace sphereprox {

namespace {

double require_kappa(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw InvalidInputError("curvature bound must be positive and finite");
  }
  return kappa;
}

// Converts the distance-dimensioned record fields in place; function values
// and the dimensionless alpha/lambda columns stay as the model wrote them.
void rescale_distances(IterationTrace& t, double scale) {
  for (StepRecord& r : t.step_records) {
    r.step_distance *= scale;
    r.dist_to_minimizer *= scale;
    r.dist_to_projection *= scale;
  }
}

}  // namespace

KappaSpace::KappaSpace(double kappa, AdmissibleSpace underlying)
    : kappa_(require_kappa(kappa)), underlying_(std::move(underlying)) {}

double KappaSpace::metric_scale() const { return 1.0 / std::sqrt(kappa_); }

double KappaSpace::d_kappa_radius() const {
  return underlying_.radius() * metric_scale();
}

double KappaSpace::diameter_bound() const { return kPi * metric_scale(); }

double KappaSpace::half_diameter_bound() const {
  return diameter_bound() / 2.0;
}

double KappaSpace::distance(const Point& x, const Point& y) const {
  return sphereprox::distance(x, y) * metric_scale();
}

ResolventResult resolvent_kappa(const ConvexFunction& f, double eta,
                                const Point& x, const KappaSpace& ks) {
  // sqrt(kappa) times the curvature-scaled distance is the model distance,
  // so the penalty term is the model penalty verbatim and the minimizing
  // point coincides; only the reported distance needs the unit change.
  ResolventResult r = resolvent({f, ks.underlying(), x, eta});
  r.penalty_distance *= ks.metric_scale();
  return r;
}

IterationTrace run_ppa_kappa(const ConvexFunction& f, const KappaSpace& ks,
                             const Point& x1, const Schedule& lambda_schedule,
                             int n_max, double stop_tol) {
  IterationTrace t = run_ppa(f, ks.underlying(), x1, lambda_schedule, n_max,
                             stop_tol / ks.metric_scale());
  rescale_distances(t, ks.metric_scale());
  return t;
}

IterationTrace run_mann_kappa(const ConvexFunction& f, const KappaSpace& ks,
                              const Point& x1, const Schedule& alpha_schedule,
                              const Schedule& lambda_schedule, int n_max,
                              double stop_tol) {
  IterationTrace t =
      run_mann(f, ks.underlying(), x1, alpha_schedule, lambda_schedule, n_max,
               stop_tol / ks.metric_scale());
  rescale_distances(t, ks.metric_scale());
  return t;
}

IterationTrace run_halpern_kappa(const ConvexFunction& f,
                                 const KappaSpace& ks, const Point& y1,
                                 const Point& v,
                                 const Schedule& alpha_schedule,
                                 const Schedule& lambda_schedule, int n_max,
                                 double stop_tol) {
  IterationTrace t =
      run_halpern(f, ks.underlying(), y1, v, alpha_schedule, lambda_schedule,
                  n_max, stop_tol / ks.metric_scale());
  rescale_distances(t, ks.metric_scale());
  return t;
}

}  // namespace sphereprox
