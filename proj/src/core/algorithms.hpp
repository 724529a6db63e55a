#ifndef SPHEREPROX_ALGORITHMS_HPP
#define SPHEREPROX_ALGORITHMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/convex_function.hpp"
#include "core/geometry.hpp"

namespace sphereprox {

// ---------------------------------------------------------------------------
// Coefficient schedules.
//
// A schedule is the sequence alpha_n or lambda_n feeding an iteration. The
// convergence theorems constrain these sequences through tail properties
// (series divergence, limits, bounds), which are never decidable from the
// finitely many terms a run consumes. Each family therefore answers the
// hypothesis questions symbolically; a custom list answers them from the
// claims its author attached, or reports "unverified".
// ---------------------------------------------------------------------------

enum class ScheduleRole { alpha, lambda };
enum class ScheduleFamily { constant, harmonic, linear, custom };

const char* to_string(ScheduleRole role);
const char* to_string(ScheduleFamily family);

// Author-supplied assertions about the infinite sequence a custom list is a
// prefix of. Absent fields leave the corresponding hypothesis unverified.
struct ScheduleClaims {
  std::optional<bool> limit_zero;            // lim_n value(n) = 0
  std::optional<bool> limit_infinity;        // lim_n value(n) = +inf
  std::optional<bool> sum_diverges;          // sum_n value(n) = +inf
  std::optional<bool> sum_squares_diverges;  // sum_n value(n)^2 = +inf
  std::optional<bool> supremum_below_one;    // sup_n value(n) < 1
  std::optional<bool> infimum_positive;      // inf_n value(n) > 0
};

// How a hypothesis verdict was reached. "symbolic" means decided exactly
// from the closed-form family; "claimed" means taken from ScheduleClaims;
// "unverified" means nobody knows (and satisfied is false).
enum class CheckMethod { symbolic, claimed, unverified };

const char* to_string(CheckMethod method);

struct Fact {
  bool satisfied = false;
  CheckMethod method = CheckMethod::unverified;
};

// satisfied iff both are; trust degrades to the weaker method.
Fact fact_and(const Fact& a, const Fact& b);
// satisfied iff either is; an unverified branch blocks certifying "false".
Fact fact_or(const Fact& a, const Fact& b);

class Schedule {
 public:
  // value(n) = c for all n. Alpha role requires c in [0,1], lambda role
  // c > 0.
  static Schedule constant(ScheduleRole role, double c);
  // value(n) = n^{-p}, p > 0. Values lie in (0,1] for either role.
  static Schedule harmonic(ScheduleRole role, double p);
  // value(n) = n. Only the lambda role admits it (alpha must stay <= 1).
  static Schedule linear(ScheduleRole role);
  // Explicit list; value(n) = values[n-1] and the horizon is the list
  // length. Range validation is per role, tail hypotheses come from claims.
  static Schedule custom(ScheduleRole role, std::vector<double> values,
                         ScheduleClaims claims = {});

  ScheduleRole role() const { return role_; }
  ScheduleFamily family() const { return family_; }

  // n is 1-based. Throws InvalidInputError for n < 1 or past the horizon.
  double value(int n) const;

  // Largest usable n; nullopt for the unbounded families.
  std::optional<int> horizon() const;

  // Parameter accessors for serialization (meaningful per family).
  double constant_value() const { return constant_; }
  double harmonic_exponent() const { return exponent_; }
  const std::vector<double>& custom_values() const { return values_; }
  const ScheduleClaims& claims() const { return claims_; }

  // Tail hypothesis facts. Closed-form families decide symbolically; custom
  // lists fall back to claims (range-type facts that a finite list does
  // witness, sup < 1 and inf > 0, are read off the list when unclaimed).
  Fact limit_zero() const;
  Fact limit_infinity() const;
  Fact sum_diverges() const;
  Fact sum_squares_diverges() const;
  Fact supremum_below_one() const;
  Fact infimum_positive() const;
  // Every value in (0,1]. Decidable from the data for custom lists.
  Fact strictly_positive_unit() const;

 private:
  Schedule(ScheduleRole role, ScheduleFamily family)
      : role_(role), family_(family) {}

  ScheduleRole role_;
  ScheduleFamily family_;
  double constant_ = 0.0;
  double exponent_ = 0.0;
  std::vector<double> values_;
  ScheduleClaims claims_;
};

// One named convergence hypothesis, with the verdict for the
// schedules actually supplied and how that verdict was reached.
struct HypothesisCheck {
  std::string condition;
  bool satisfied = false;
  std::string method;  // "symbolic-per-family" | "claimed" | "unverified"
};

HypothesisCheck make_check(std::string condition, const Fact& fact);

// ---------------------------------------------------------------------------
// Iteration traces.
// ---------------------------------------------------------------------------

enum class SchemeKind { ppa, mann, halpern };

const char* to_string(SchemeKind scheme);

enum class TerminationReason {
  step_below_tolerance,  // d(x_{n+1}, x_n) < stop_tol
  reached_iteration_cap,
  resolvent_failure,  // inner solver gave up; trace is the completed prefix
};

const char* to_string(TerminationReason reason);

struct StepRecord {
  int n = 0;        // 1-based step index
  double alpha = 0.0;  // 0 for plain proximal steps
  double lambda = 0.0;
  double step_distance = 0.0;       // d(z_n, x_n)
  double value_at_iterate = 0.0;    // f(x_n)
  double value_at_resolvent = 0.0;  // f(z_n)
  // d(x_n, reference); NaN when the reference point is not registered.
  double dist_to_minimizer = 0.0;
  double dist_to_projection = 0.0;
};

struct IterationTrace {
  SchemeKind scheme = SchemeKind::ppa;
  // x_1 .. x_{N+1}: starting point plus one entry per completed step.
  std::vector<Point> iterates;
  // z_n = R_{lambda_n f} x_n, one per completed step.
  std::vector<Point> resolvent_points;
  std::vector<StepRecord> step_records;
  // Anchor v of the anchored scheme; absent otherwise.
  std::optional<Point> anchor;
  // Registered reference points: the certified minimizer of f (when the
  // structure exposes one) and, for anchored runs, the metric projection of
  // the anchor onto Argmin f. Computed once before the run.
  std::optional<Point> reference_minimizer;
  std::optional<Point> reference_projection;
  std::vector<HypothesisCheck> hypothesis_checks;
  TerminationReason terminated_reason = TerminationReason::reached_iteration_cap;
  // Nonempty exactly when terminated_reason == resolvent_failure.
  std::string failure_message;
};

// Largest distance between a stored iterate and the update rule recomputed
// from the stored points and coefficients; 0 up to roundoff for any trace
// the runners produce. Also verifies the length bookkeeping (throws
// InvalidInputError on an inconsistent trace).
double max_update_deviation(const IterationTrace& trace);

// ---------------------------------------------------------------------------
// Runners. All three stop after n_max steps or as soon as
// d(x_{n+1}, x_n) < stop_tol, whichever comes first. Schedules must carry
// the matching role and cover n_max steps; ranges are validated for the
// whole horizon up front. A resolvent convergence failure ends the run with
// the completed prefix and terminated_reason = resolvent_failure.
// ---------------------------------------------------------------------------

inline constexpr int kDefaultIterationCap = 10000;
inline constexpr double kDefaultStopTolerance = 1e-10;

// x_{n+1} = R_{lambda_n f} x_n.
IterationTrace run_ppa(const ConvexFunction& f, const AdmissibleSpace& space,
                       const Point& x1, const Schedule& lambda_schedule,
                       int n_max = kDefaultIterationCap,
                       double stop_tol = kDefaultStopTolerance);

// x_{n+1} = alpha_n x_n (+) (1 - alpha_n) R_{lambda_n f} x_n, with
// alpha_n in [0,1). Records the divergence hypothesis on
// sum (1 - alpha_n) lambda_n and the bound sup alpha_n < 1.
IterationTrace run_mann(const ConvexFunction& f, const AdmissibleSpace& space,
                        const Point& x1, const Schedule& alpha_schedule,
                        const Schedule& lambda_schedule,
                        int n_max = kDefaultIterationCap,
                        double stop_tol = kDefaultStopTolerance);

// y_{n+1} = alpha_n v (+) (1 - alpha_n) R_{lambda_n f} y_n, with alpha_n in
// [0,1]. Records both admissible hypothesis regimes: growing weights
// (lim lambda_n = inf) and bounded-below weights (inf lambda_n > 0), each
// together with lim alpha_n = 0 and sum alpha_n^2 = inf. The metric
// projection of v onto Argmin f is registered as a reference point.
IterationTrace run_halpern(const ConvexFunction& f,
                           const AdmissibleSpace& space, const Point& y1,
                           const Point& v, const Schedule& alpha_schedule,
                           const Schedule& lambda_schedule,
                           int n_max = kDefaultIterationCap,
                           double stop_tol = kDefaultStopTolerance);

// Metric projection of v onto Argmin f. Uses the certified minimizer when
// the structure exposes one; a purely-indicator objective projects onto the
// constraint intersection; anything else falls back to the grid oracle's
// argmin set (ambient dimension 3 only) and picks the representative
// nearest to v.
Point metric_project_to_argmin(const ConvexFunction& f,
                               const AdmissibleSpace& space, const Point& v);

}  // namespace sphereprox

#endif
