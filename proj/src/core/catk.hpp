#ifndef SPHEREPROX_CATK_HPP
#define SPHEREPROX_CATK_HPP

#include "core/algorithms.hpp"
#include "core/geometry.hpp"
#include "core/resolvent.hpp"

namespace sphereprox {

// Positive-curvature wrapper. A space of curvature bound kappa > 0 with
// diameter below pi/(2 sqrt(kappa)) is, after multiplying its metric by
// sqrt(kappa), an admissible unit-curvature space; this class carries the
// curvature together with that rescaled model and converts units at the
// boundary. All numerics run on the model — points are shared between the
// two readings of the space, only reported distances change by the factor
// 1/sqrt(kappa).
class KappaSpace {
 public:
  // Throws InvalidInputError unless kappa is positive and finite.
  KappaSpace(double kappa, AdmissibleSpace underlying);

  double kappa() const { return kappa_; }
  const AdmissibleSpace& underlying() const { return underlying_; }

  // Factor taking model distances to curvature-scaled ones: 1/sqrt(kappa).
  double metric_scale() const;

  // Ball radius of the space in curvature-scaled units.
  double d_kappa_radius() const;

  // Diameter bound pi/sqrt(kappa) of a complete space with this curvature,
  // and the half bound that admissibility and the step certificates use.
  double diameter_bound() const;
  double half_diameter_bound() const;

  // Distance in curvature-scaled units.
  double distance(const Point& x, const Point& y) const;

 private:
  double kappa_;
  AdmissibleSpace underlying_;
};

// Proximal minimizer of f with weight eta at x, penalized by
// tan(sqrt(kappa) d(y, x)) sin(sqrt(kappa) d(y, x)) where d is the
// curvature-scaled metric. Identical point to the unit-curvature resolvent
// of weight eta on the model; penalty_distance comes back in
// curvature-scaled units. Errors as the model resolvent.
ResolventResult resolvent_kappa(const ConvexFunction& f, double eta,
                                const Point& x, const KappaSpace& ks);

// The iteration runners under curvature kappa: identical point sequences
// to their model counterparts, with step_distance, dist_to_minimizer,
// dist_to_projection, and the stopping tolerance all read in
// curvature-scaled units.
IterationTrace run_ppa_kappa(const ConvexFunction& f, const KappaSpace& ks,
                             const Point& x1, const Schedule& lambda_schedule,
                             int n_max = kDefaultIterationCap,
                             double stop_tol = kDefaultStopTolerance);

IterationTrace run_mann_kappa(const ConvexFunction& f, const KappaSpace& ks,
                              const Point& x1, const Schedule& alpha_schedule,
                              const Schedule& lambda_schedule,
                              int n_max = kDefaultIterationCap,
                              double stop_tol = kDefaultStopTolerance);

IterationTrace run_halpern_kappa(const ConvexFunction& f,
                                 const KappaSpace& ks, const Point& y1,
                                 const Point& v,
                                 const Schedule& alpha_schedule,
                                 const Schedule& lambda_schedule,
                                 int n_max = kDefaultIterationCap,
                                 double stop_tol = kDefaultStopTolerance);

}  // namespace sphereprox

#endif
