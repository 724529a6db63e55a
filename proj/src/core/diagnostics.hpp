#ifndef SPHEREPROX_DIAGNOSTICS_HPP
#define SPHEREPROX_DIAGNOSTICS_HPP

#include <cstddef>
#include <vector>

#include "core/algorithms.hpp"
#include "core/convex_function.hpp"
#include "core/geometry.hpp"

namespace sphereprox {

// Trace-level analysis: asymptotic centers of point sequences, spherical
// boundedness certificates, and the concave averaged-cosine functional whose
// maximizer drives the existence arguments. Finite traces admit no true
// limsup, so every tail quantity works over an explicit window [tail_start,
// end) and records that window.

inline constexpr double kDefaultGridResolution = 5e-3;
inline constexpr double kRefinementStepMin = 1e-6;
inline constexpr double kBoundednessMargin = 1e-6;

// Conventional window: the last half of the sequence.
int default_tail_start(std::size_t n_points);

struct AsymptoticCenterEstimate {
  Point center;
  // min over y of max_{k >= tail_start} d(y, p_k), attained at center.
  double radius_estimate = 0.0;
  int tail_start = 0;
  double grid_resolution = 0.0;
};

// Minimizer of y |-> max_{k >= tail_start} d(y, p_k) over the space: grid
// scan (the tail points themselves are candidates too) plus a golden-section
// local refinement down to step 1e-6. Needs ambient dimension 3 and at
// least 10 tail points; duplicate tail points are collapsed first.
AsymptoticCenterEstimate asymptotic_center(
    const std::vector<Point>& points, int tail_start,
    const AdmissibleSpace& space,
    double resolution = kDefaultGridResolution);

struct BoundednessCertificate {
  // tail_inf_sup < pi/2 - margin, the numerical surrogate for spherical
  // boundedness of the proximal point sequence.
  bool spherically_bounded_estimate = false;
  // Asymptotic-center radius of the proximal points' tail.
  double tail_inf_sup = 0.0;
  // max_n d(z_n, x_n) over the recorded steps.
  double sup_step_distance = 0.0;
  int tail_start = 0;
};

BoundednessCertificate boundedness_certificate(
    const IterationTrace& trace, int tail_start, const AdmissibleSpace& space,
    double resolution = kDefaultGridResolution);

struct GFunctionEstimate {
  std::vector<double> beta_weights;
  // Running partial sums sigma_n = beta_1 + ... + beta_n.
  std::vector<double> sigma_n;
  Point maximizer;
  // Value of the averaged cosine at the maximizer, in [0, 1].
  double max_value = 0.0;
};

// Maximizer over the space of
//   g_N(y) = (1/sigma_N) sum_k beta_k cos d(y, z_k),
// the finite-stage version of the existence functional: grid scan plus
// local refinement. Coincident points are merged (weights added) before
// evaluation. g_N is 1-Lipschitz and geodesically concave; a sampled
// self-check of the Lipschitz bound guards the estimate. Needs at least 10
// points, positive weights, ambient dimension 3.
GFunctionEstimate g_maximizer(const std::vector<Point>& resolvent_points,
                              const std::vector<double>& beta_weights,
                              const AdmissibleSpace& space,
                              double resolution = kDefaultGridResolution);

// The proof-side weights beta_n = (1 - alpha_n) lambda_n C^2 / (1 + C^2)
// with C = cos d(z_n, x_n), read off a recorded trace.
std::vector<double> g_weights_from_trace(const IterationTrace& trace);

// Per-step residuals (nonnegative when the corresponding inequality holds)
// of the quantitative chains a run must satisfy against a minimizer u:
//   quasi_firm:     cos d(z_n,x_n) cos d(u,z_n) - cos d(u,x_n)
//   cosine_update:  cos d(u,x_{n+1})
//                     - [alpha_n cos d(u,b_n) + (1-alpha_n) cos d(u,z_n)]
//                   with b_n the averaged base (x_n) or the anchor (v)
//   fejer:          d(u,x_n) - d(u,x_{n+1})            (averaged/plain)
//                   max{d(u,v), d(u,y_n)} - d(u,y_{n+1})  (anchored)
//   proximal_chain: d(u,y_n) - max{d(u,z_n), d(z_n,y_n)}  (anchored only)
struct TraceInequalityReport {
  std::vector<double> quasi_firm;
  std::vector<double> cosine_update;
  std::vector<double> fejer;
  std::vector<double> proximal_chain;
  double min_residual = 0.0;
  bool pass = false;  // min_residual >= -1e-8
};

TraceInequalityReport check_trace_inequalities(const IterationTrace& trace,
                                               const ConvexFunction& f,
                                               const Point& u);

}  // namespace sphereprox

#endif
