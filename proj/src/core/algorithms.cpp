#include "core/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/resolvent.hpp"

namespace sphereprox {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int trust(CheckMethod m) {
  switch (m) {
    case CheckMethod::symbolic:
      return 2;
    case CheckMethod::claimed:
      return 1;
    case CheckMethod::unverified:
      return 0;
  }
  return 0;
}

CheckMethod weaker(CheckMethod a, CheckMethod b) {
  return trust(a) <= trust(b) ? a : b;
}

CheckMethod stronger(CheckMethod a, CheckMethod b) {
  return trust(a) >= trust(b) ? a : b;
}

Fact symbolic(bool satisfied) { return {satisfied, CheckMethod::symbolic}; }

Fact from_claim(const std::optional<bool>& claim) {
  if (claim) return {*claim, CheckMethod::claimed};
  return {false, CheckMethod::unverified};
}

void require_range(ScheduleRole role, double v) {
  if (role == ScheduleRole::alpha) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw InvalidInputError("alpha schedule values must lie in [0, 1]");
  } else {
    if (!std::isfinite(v) || v <= 0.0)
      throw InvalidInputError(
          "lambda schedule values must be positive and finite");
  }
}

}  // namespace

const char* to_string(ScheduleRole role) {
  return role == ScheduleRole::alpha ? "alpha" : "lambda";
}

const char* to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::constant:
      return "constant";
    case ScheduleFamily::harmonic:
      return "harmonic";
    case ScheduleFamily::linear:
      return "linear";
    case ScheduleFamily::custom:
      return "custom";
  }
  return "?";
}

const char* to_string(CheckMethod method) {
  switch (method) {
    case CheckMethod::symbolic:
      return "symbolic-per-family";
    case CheckMethod::claimed:
      return "claimed";
    case CheckMethod::unverified:
      return "unverified";
  }
  return "?";
}

const char* to_string(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::ppa:
      return "ppa";
    case SchemeKind::mann:
      return "mann";
    case SchemeKind::halpern:
      return "halpern";
  }
  return "?";
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::step_below_tolerance:
      return "step_below_tolerance";
    case TerminationReason::reached_iteration_cap:
      return "reached_iteration_cap";
    case TerminationReason::resolvent_failure:
      return "resolvent_failure";
  }
  return "?";
}

Fact fact_and(const Fact& a, const Fact& b) {
  if (a.satisfied && b.satisfied) return {true, weaker(a.method, b.method)};
  // The conjunction is certified false only through a certified-false
  // conjunct; an unverified one merely withholds certification.
  CheckMethod m = CheckMethod::unverified;
  if (!a.satisfied && a.method != CheckMethod::unverified)
    m = stronger(m, a.method);
  if (!b.satisfied && b.method != CheckMethod::unverified)
    m = stronger(m, b.method);
  return {false, m};
}

Fact fact_or(const Fact& a, const Fact& b) {
  if (a.satisfied || b.satisfied) {
    CheckMethod m = CheckMethod::unverified;
    if (a.satisfied) m = stronger(m, a.method);
    if (b.satisfied) m = stronger(m, b.method);
    return {true, m};
  }
  // False only when every branch is known false.
  return {false, weaker(a.method, b.method)};
}

Schedule Schedule::constant(ScheduleRole role, double c) {
  require_range(role, c);
  Schedule s(role, ScheduleFamily::constant);
  s.constant_ = c;
  return s;
}

Schedule Schedule::harmonic(ScheduleRole role, double p) {
  if (!std::isfinite(p) || p <= 0.0)
    throw InvalidInputError("harmonic schedule exponent must be positive");
  Schedule s(role, ScheduleFamily::harmonic);
  s.exponent_ = p;
  return s;
}

Schedule Schedule::linear(ScheduleRole role) {
  if (role == ScheduleRole::alpha)
    throw InvalidInputError(
        "a linear schedule exceeds 1 from n = 2 on and cannot serve as alpha");
  return Schedule(role, ScheduleFamily::linear);
}

Schedule Schedule::custom(ScheduleRole role, std::vector<double> values,
                          ScheduleClaims claims) {
  if (values.empty())
    throw InvalidInputError("custom schedule needs at least one value");
  for (double v : values) require_range(role, v);
  Schedule s(role, ScheduleFamily::custom);
  s.values_ = std::move(values);
  s.claims_ = claims;
  return s;
}

double Schedule::value(int n) const {
  if (n < 1) throw InvalidInputError("schedule index is 1-based");
  switch (family_) {
    case ScheduleFamily::constant:
      return constant_;
    case ScheduleFamily::harmonic:
      return std::pow(static_cast<double>(n), -exponent_);
    case ScheduleFamily::linear:
      return static_cast<double>(n);
    case ScheduleFamily::custom:
      if (static_cast<std::size_t>(n) > values_.size())
        throw InvalidInputError("custom schedule has no value at index " +
                                std::to_string(n));
      return values_[static_cast<std::size_t>(n) - 1];
  }
  throw InvalidInputError("corrupt schedule family");
}

std::optional<int> Schedule::horizon() const {
  if (family_ == ScheduleFamily::custom)
    return static_cast<int>(values_.size());
  return std::nullopt;
}

Fact Schedule::limit_zero() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ == 0.0);
    case ScheduleFamily::harmonic:
      return symbolic(true);
    case ScheduleFamily::linear:
      return symbolic(false);
    case ScheduleFamily::custom:
      return from_claim(claims_.limit_zero);
  }
  return {};
}

Fact Schedule::limit_infinity() const {
  switch (family_) {
    case ScheduleFamily::constant:
    case ScheduleFamily::harmonic:
      return symbolic(false);
    case ScheduleFamily::linear:
      return symbolic(true);
    case ScheduleFamily::custom:
      return from_claim(claims_.limit_infinity);
  }
  return {};
}

Fact Schedule::sum_diverges() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ > 0.0);
    case ScheduleFamily::harmonic:
      return symbolic(exponent_ <= 1.0);
    case ScheduleFamily::linear:
      return symbolic(true);
    case ScheduleFamily::custom:
      return from_claim(claims_.sum_diverges);
  }
  return {};
}

Fact Schedule::sum_squares_diverges() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ > 0.0);
    case ScheduleFamily::harmonic:
      return symbolic(exponent_ <= 0.5);
    case ScheduleFamily::linear:
      return symbolic(true);
    case ScheduleFamily::custom:
      return from_claim(claims_.sum_squares_diverges);
  }
  return {};
}

Fact Schedule::supremum_below_one() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ < 1.0);
    case ScheduleFamily::harmonic:
      // n = 1 gives exactly 1.
      return symbolic(false);
    case ScheduleFamily::linear:
      return symbolic(false);
    case ScheduleFamily::custom:
      if (claims_.supremum_below_one)
        return {*claims_.supremum_below_one, CheckMethod::claimed};
      // The list is the whole schedule, so its maximum is the supremum.
      return symbolic(*std::max_element(values_.begin(), values_.end()) <
                      1.0);
  }
  return {};
}

Fact Schedule::infimum_positive() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ > 0.0);
    case ScheduleFamily::harmonic:
      return symbolic(false);
    case ScheduleFamily::linear:
      return symbolic(true);
    case ScheduleFamily::custom:
      if (claims_.infimum_positive)
        return {*claims_.infimum_positive, CheckMethod::claimed};
      return symbolic(*std::min_element(values_.begin(), values_.end()) >
                      0.0);
  }
  return {};
}

Fact Schedule::strictly_positive_unit() const {
  switch (family_) {
    case ScheduleFamily::constant:
      return symbolic(constant_ > 0.0 && constant_ <= 1.0);
    case ScheduleFamily::harmonic:
      return symbolic(true);
    case ScheduleFamily::linear:
      return symbolic(false);
    case ScheduleFamily::custom: {
      const auto [lo, hi] =
          std::minmax_element(values_.begin(), values_.end());
      return symbolic(*lo > 0.0 && *hi <= 1.0);
    }
  }
  return {};
}

HypothesisCheck make_check(std::string condition, const Fact& fact) {
  return {std::move(condition), fact.satisfied,
          std::string(to_string(fact.method))};
}

double max_update_deviation(const IterationTrace& t) {
  const std::size_t steps = t.step_records.size();
  if (t.resolvent_points.size() != steps ||
      t.iterates.size() != steps + 1)
    throw InvalidInputError("trace length bookkeeping is inconsistent");
  if ((t.scheme == SchemeKind::halpern) != t.anchor.has_value())
    throw InvalidInputError("anchor presence disagrees with the scheme");
  double worst = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const StepRecord& r = t.step_records[i];
    const Point& x = t.iterates[i];
    const Point& z = t.resolvent_points[i];
    Point expected = [&]() -> Point {
      switch (t.scheme) {
        case SchemeKind::ppa:
          return z;
        case SchemeKind::mann:
          return interpolate(x, z, r.alpha);
        case SchemeKind::halpern:
          return interpolate(*t.anchor, z, r.alpha);
      }
      return z;
    }();
    // Bitwise-equal points short-circuit: distance() of a point to itself
    // is ~1e-16 when its stored norm is an ulp off 1.
    if (t.iterates[i + 1].same_coords(expected)) continue;
    worst = std::max(worst, distance(t.iterates[i + 1], expected));
  }
  return worst;
}

namespace {

void require_same_space(const ConvexFunction& f, const AdmissibleSpace& space) {
  const AdmissibleSpace& fs = f.space();
  if (!fs.pole().same_coords(space.pole()) || fs.radius() != space.radius())
    throw InvalidInputError("run space disagrees with the function's space");
}

void require_run_setup(const ConvexFunction& f, const AdmissibleSpace& space,
                       const Point& start, int n_max, double stop_tol) {
  require_same_space(f, space);
  if (n_max < 1) throw InvalidInputError("n_max must be at least 1");
  if (!std::isfinite(stop_tol) || stop_tol < 0.0)
    throw InvalidInputError("stop_tol must be finite and nonnegative");
  if (!space.contains(start))
    throw InvalidInputError("starting point lies outside the space");
}

void require_schedule(const Schedule& s, ScheduleRole expected_role,
                      int n_max) {
  if (s.role() != expected_role)
    throw InvalidInputError(std::string("schedule has role ") +
                            to_string(s.role()) + ", expected " +
                            to_string(expected_role));
  if (const auto h = s.horizon(); h && *h < n_max)
    throw InvalidInputError("custom schedule covers " + std::to_string(*h) +
                            " steps but the run asks for " +
                            std::to_string(n_max));
}

// Strictness beyond the [0,1] construction check: the averaged scheme puts
// weight 1 - alpha_n on the proximal point and needs alpha_n < 1 for every
// step it might take.
void require_alpha_below_one(const Schedule& s) {
  bool ok = true;
  switch (s.family()) {
    case ScheduleFamily::constant:
      ok = s.constant_value() < 1.0;
      break;
    case ScheduleFamily::harmonic:
      ok = false;  // first value is exactly 1
      break;
    case ScheduleFamily::linear:
      ok = false;
      break;
    case ScheduleFamily::custom: {
      const auto& v = s.custom_values();
      ok = *std::max_element(v.begin(), v.end()) < 1.0;
      break;
    }
  }
  if (!ok)
    throw InvalidInputError(
        "averaged-scheme alpha values must stay strictly below 1");
}

// Certification of sum (1 - alpha_n) lambda_n = infinity. Sufficient for
// divergence: sum lambda_n diverges while alpha_n stays away from 1 (either
// sup alpha_n < 1 or alpha_n -> 0). Necessary for convergence: the series
// is dominated by sum lambda_n. In between, no certificate either way.
Fact mann_series_fact(const Schedule& alpha, const Schedule& lambda) {
  const Fact lam_div = lambda.sum_diverges();
  if (!lam_div.satisfied && lam_div.method != CheckMethod::unverified)
    return {false, lam_div.method};
  const Fact away = fact_or(alpha.supremum_below_one(), alpha.limit_zero());
  if (lam_div.satisfied && away.satisfied)
    return {true, weaker(lam_div.method, away.method)};
  return {false, CheckMethod::unverified};
}

std::vector<HypothesisCheck> mann_checks(const Schedule& alpha,
                                         const Schedule& lambda) {
  std::vector<HypothesisCheck> checks;
  checks.push_back(make_check("sum (1 - alpha_n) lambda_n diverges",
                              mann_series_fact(alpha, lambda)));
  checks.push_back(
      make_check("sup alpha_n < 1", alpha.supremum_below_one()));
  return checks;
}

std::vector<HypothesisCheck> halpern_checks(const Schedule& alpha,
                                            const Schedule& lambda) {
  const Fact lim0 = alpha.limit_zero();
  const Fact sq = alpha.sum_squares_diverges();
  const Fact lam_inf = lambda.limit_infinity();
  const Fact lam_low = lambda.infimum_positive();
  const Fact unit = alpha.strictly_positive_unit();
  std::vector<HypothesisCheck> checks;
  checks.push_back(make_check("lim alpha_n = 0", lim0));
  checks.push_back(make_check("sum alpha_n^2 diverges", sq));
  checks.push_back(make_check("sum alpha_n diverges [informational]",
                              alpha.sum_diverges()));
  checks.push_back(make_check("lim lambda_n = infinity", lam_inf));
  checks.push_back(make_check("inf lambda_n > 0", lam_low));
  checks.push_back(make_check("alpha_n in (0, 1]", unit));
  checks.push_back(make_check(
      "regime: growing weights (lim lambda_n = inf, lim alpha_n = 0, "
      "sum alpha_n^2 = inf)",
      fact_and(lam_inf, fact_and(lim0, sq))));
  checks.push_back(make_check(
      "regime: bounded weights (inf lambda_n > 0, alpha_n in (0, 1], "
      "lim alpha_n = 0, sum alpha_n^2 = inf)",
      fact_and(lam_low, fact_and(unit, fact_and(lim0, sq)))));
  return checks;
}

// All addends are indicator balls, so Argmin is the constraint intersection.
bool purely_indicator(const ConvexFunction& f) {
  switch (f.kind()) {
    case FunctionKind::indicator_ball:
      return true;
    case FunctionKind::sum:
      return std::all_of(f.addends().begin(), f.addends().end(),
                         [](const ConvexFunction& g) {
                           return purely_indicator(g);
                         });
    default:
      return false;
  }
}

IterationTrace run_core(SchemeKind kind, const ConvexFunction& f,
                        const AdmissibleSpace& space, const Point& start,
                        const Point* anchor, const Schedule* alpha_schedule,
                        const Schedule& lambda_schedule, int n_max,
                        double stop_tol) {
  IterationTrace t;
  t.scheme = kind;
  t.iterates.push_back(start);
  if (anchor) t.anchor = *anchor;
  t.reference_minimizer = f.known_minimizer();
  if (kind == SchemeKind::halpern)
    t.reference_projection = metric_project_to_argmin(f, space, *anchor);
  if (kind == SchemeKind::mann)
    t.hypothesis_checks = mann_checks(*alpha_schedule, lambda_schedule);
  if (kind == SchemeKind::halpern)
    t.hypothesis_checks = halpern_checks(*alpha_schedule, lambda_schedule);
  t.terminated_reason = TerminationReason::reached_iteration_cap;

  for (int n = 1; n <= n_max; ++n) {
    const Point& xn = t.iterates.back();
    const double lam = lambda_schedule.value(n);
    const double alp = alpha_schedule ? alpha_schedule->value(n) : 0.0;

    Point zn = xn;
    try {
      zn = resolvent({f, space, xn, lam}).minimizer;
    } catch (const ConvergenceFailureError& e) {
      t.terminated_reason = TerminationReason::resolvent_failure;
      t.failure_message = e.what();
      break;
    }

    StepRecord rec;
    rec.n = n;
    rec.alpha = alp;
    rec.lambda = lam;
    rec.step_distance = distance(zn, xn);
    rec.value_at_iterate = f.evaluate(xn);
    rec.value_at_resolvent = f.evaluate(zn);
    rec.dist_to_minimizer =
        t.reference_minimizer ? distance(xn, *t.reference_minimizer) : kNaN;
    rec.dist_to_projection =
        t.reference_projection ? distance(xn, *t.reference_projection) : kNaN;
    t.step_records.push_back(rec);

    Point xnext = [&]() -> Point {
      switch (kind) {
        case SchemeKind::ppa:
          return zn;
        case SchemeKind::mann:
          return interpolate(xn, zn, alp);
        case SchemeKind::halpern:
          return interpolate(*anchor, zn, alp);
      }
      return zn;
    }();
    const double moved = distance(xnext, xn);
    t.resolvent_points.push_back(std::move(zn));
    t.iterates.push_back(std::move(xnext));
    if (moved < stop_tol) {
      t.terminated_reason = TerminationReason::step_below_tolerance;
      break;
    }
  }
  return t;
}

}  // namespace

IterationTrace run_ppa(const ConvexFunction& f, const AdmissibleSpace& space,
                       const Point& x1, const Schedule& lambda_schedule,
                       int n_max, double stop_tol) {
  require_run_setup(f, space, x1, n_max, stop_tol);
  require_schedule(lambda_schedule, ScheduleRole::lambda, n_max);
  return run_core(SchemeKind::ppa, f, space, x1, nullptr, nullptr,
                  lambda_schedule, n_max, stop_tol);
}

IterationTrace run_mann(const ConvexFunction& f, const AdmissibleSpace& space,
                        const Point& x1, const Schedule& alpha_schedule,
                        const Schedule& lambda_schedule, int n_max,
                        double stop_tol) {
  require_run_setup(f, space, x1, n_max, stop_tol);
  require_schedule(alpha_schedule, ScheduleRole::alpha, n_max);
  require_schedule(lambda_schedule, ScheduleRole::lambda, n_max);
  require_alpha_below_one(alpha_schedule);
  return run_core(SchemeKind::mann, f, space, x1, nullptr, &alpha_schedule,
                  lambda_schedule, n_max, stop_tol);
}

IterationTrace run_halpern(const ConvexFunction& f,
                           const AdmissibleSpace& space, const Point& y1,
                           const Point& v, const Schedule& alpha_schedule,
                           const Schedule& lambda_schedule, int n_max,
                           double stop_tol) {
  require_run_setup(f, space, y1, n_max, stop_tol);
  require_schedule(alpha_schedule, ScheduleRole::alpha, n_max);
  require_schedule(lambda_schedule, ScheduleRole::lambda, n_max);
  if (!space.contains(v))
    throw InvalidInputError("anchor point lies outside the space");
  return run_core(SchemeKind::halpern, f, space, y1, &v, &alpha_schedule,
                  lambda_schedule, n_max, stop_tol);
}

Point metric_project_to_argmin(const ConvexFunction& f,
                               const AdmissibleSpace& space, const Point& v) {
  require_same_space(f, space);
  if (!space.contains(v))
    throw InvalidInputError("projection query lies outside the space");
  // Certified singleton minimizer: the projection regardless of v.
  if (const auto& m = f.known_minimizer()) return *m;
  const Vec& vc = v.coords();
  const std::vector<double> v_raw(vc.data(), vc.data() + vc.size());
  if (purely_indicator(f)) {
    // Argmin is the intersection of the constraint balls. Exact for a
    // single ball; cyclic projection approximates the rest.
    auto p = project_to_balls(space, v, f.constraint_balls());
    if (!p)
      throw ConvergenceFailureError(
          "projection onto the constraint intersection did not converge",
          v_raw);
    return *p;
  }
  // Grid oracle fallback: representatives of Argmin, nearest one to v.
  const auto argmin_set = brute_force_argmin_set(f, space, 2e-3);
  if (argmin_set.empty())
    throw ConvergenceFailureError("argmin set came back empty", v_raw);
  const Point* best = &argmin_set.front();
  double best_d = distance(*best, v);
  for (const Point& p : argmin_set) {
    const double d = distance(p, v);
    if (d < best_d) {
      best_d = d;
      best = &p;
    }
  }
  return *best;
}

}  // namespace sphereprox
