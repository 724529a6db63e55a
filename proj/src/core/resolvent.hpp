#ifndef SPHEREPROX_RESOLVENT_HPP
#define SPHEREPROX_RESOLVENT_HPP

#include "core/convex_function.hpp"
#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace sphereprox {

// Penalty tan(t) sin(t) attached to the query point. Finite and strictly
// convex on [0, pi/2), +infinity from pi/2 on. Since the space radius is
// below pi/4, any two points of a space are closer than pi/2 and the
// penalty is finite on the whole space.
double tan_sin_penalty(double t);

// d/dt [tan t sin t] = sin t (1 + sec^2 t). +infinity from pi/2 on.
double tan_sin_penalty_derivative(double t);

// One proximal evaluation: which function, where, and with what weight.
// References must outlive the query.
struct ResolventQuery {
  const ConvexFunction& f;
  const AdmissibleSpace& space;
  Point x;
  double lambda;
};

struct ResolventResult {
  // argmin over the space of f(y) + (1/lambda) tan d(y,x) sin d(y,x)
  Point minimizer;
  // total objective at the minimizer, f evaluated in its shifted form
  double objective;
  // d(minimizer, x); always below pi/2 on an admissible space
  double penalty_distance;
  // cos(penalty_distance), the contraction modulus of the proximal step
  double cosine_c;
  // first-order stationarity: distance between the convex hull of the
  // negative subgradients and the cone of active constraint normals
  double inner_residual;
  // inner solver iterations (0 when a closed form applied)
  int iterations;
};

// Proximal minimizer of f with weight lambda at x.
//
// Dispatch: a single indicator ball short-circuits to the exact metric
// projection; smooth objectives (optionally ball-constrained) run projected
// gradient descent followed by an active-set Newton polish on the analytic
// gradient; objectives with a multi-anchor max part enumerate the active
// structure (per-term smooth solves, equal-distance circles, triple
// equal-distance points) and polish the winner. The max path needs ambient
// dimension 3.
//
// Throws InvalidInputError for lambda <= 0, x outside the space, or a
// query space that disagrees with f's; NotImplementedError for max parts
// outside ambient dimension 3 or sums with more than one max addend;
// ConvergenceFailureError (carrying the best iterate) if the descent phase
// exhausts its iteration budget.
ResolventResult resolvent(const ResolventQuery& q);

// Scalar reference solver for the single-anchor case: the minimizer lies on
// the geodesic from x to the anchor, so the problem reduces to minimizing
// g(t) = 1 - cos(D - t) + (1/lambda) tan t sin t over t in [0, D] with
// D = d(x, anchor). Golden-section bracketing plus a derivative root polish.
// Independent of the general solver on purpose; tests play them against
// each other. `attractor` must be f's anchor.
ResolventResult resolvent_on_geodesic(const ConvexFunction& f, double lambda,
                                      const Point& x, const Point& attractor);

// Signed residuals (lhs - rhs, nonnegative when the property holds) of the
// quantitative resolvent inequalities. Each evaluates the resolvents it
// needs internally.

// cos d(Rx, x) cos d(u, Rx) - cos d(u, x) for u a minimizer of f.
double check_quasi_firm(const ResolventQuery& q, const Point& u);

// Two-point firm nonexpansivity across weights lambda and mu:
//   (l C1^2 (1+C2^2) C2 + m C2^2 (1+C1^2) C1) cos d(R1, R2)
//     - l C1^2 (1+C2^2) cos d(R1, y) - m C2^2 (1+C1^2) cos d(R2, x).
// The queries must share f and space.
double check_firm_pair(const ResolventQuery& q1, const ResolventQuery& q2);

// Value gap bound against a minimizer u:
//   (pi/2)(1/C^2 + 1)(C cos d(u, Rx) - cos d(u, x)) - lambda (f(Rx) - f(u)).
// Shift constants cancel in the f difference.
double check_sq_firm(const ResolventQuery& q, const Point& u);

// Local optimality certificate, independent of the solver: evaluates the
// total objective at n_probes random feasible points at distance 1e-4
// around the reported minimizer, plus f's known minimizer if it has one,
// and returns objective(minimizer) minus the best probe value. At most
// ~1e-8 when the result is genuinely optimal; positive beyond that means a
// probe beat the solver.
double verify_local_optimality(const ResolventQuery& q,
                               const ResolventResult& r, Rng& rng,
                               int n_probes = 32);

}  // namespace sphereprox

#endif
