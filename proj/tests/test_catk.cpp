#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/catk.hpp"
#include "core/convex_function.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"

using namespace sphereprox;

namespace {

Point pt(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return Point::from_unnormalized(std::move(v));
}

AdmissibleSpace default_space() {
  return AdmissibleSpace::with_default_radius(pt(0, 0, 1));
}

void check_same_points(const std::vector<Point>& lhs,
                       const std::vector<Point>& rhs) {
  REQUIRE(lhs.size() == rhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    CHECK(lhs[i].same_coords(rhs[i]));
  }
}

}  // namespace

TEST_CASE("unit curvature wrapper reproduces the flat resolvent exactly") {
  const AdmissibleSpace space = default_space();
  const KappaSpace ks(1.0, space);
  const ConvexFunction f =
      ConvexFunction::neg_cos_distance(space, pt(0.2, 0.1, 1));
  const Point x = pt(-0.1, 0.2, 1);

  const ResolventResult wrapped = resolvent_kappa(f, 0.7, x, ks);
  const ResolventResult flat = resolvent({f, space, x, 0.7});
  CHECK(wrapped.minimizer.same_coords(flat.minimizer));
  CHECK(wrapped.objective == flat.objective);
  CHECK(wrapped.penalty_distance == flat.penalty_distance);
  CHECK(wrapped.cosine_c == flat.cosine_c);
  CHECK(wrapped.inner_residual == flat.inner_residual);
  CHECK(wrapped.iterations == flat.iterations);
}

TEST_CASE("indicator resolvent is the metric projection at any curvature") {
  const AdmissibleSpace space = default_space();
  const Point c = pt(0.05, 0.0, 1);
  const double r = 0.2;
  const ConvexFunction f = ConvexFunction::indicator_ball(space, c, r);
  const Point x = pt(0.3, 0.2, 1);
  REQUIRE(distance(c, x) > r);

  const Point expected = point_toward(c, x, r);
  const ResolventResult at1 = resolvent_kappa(f, 0.9, x, KappaSpace(1.0, space));
  const ResolventResult at4 = resolvent_kappa(f, 0.9, x, KappaSpace(4.0, space));
  CHECK(distance(at1.minimizer, expected) <= 1e-9);
  CHECK(distance(at4.minimizer, expected) <= 1e-9);
  CHECK(at4.minimizer.same_coords(at1.minimizer));
  // Same point, distances read in curvature units.
  CHECK(at4.penalty_distance == at1.penalty_distance / 2.0);
}

TEST_CASE("rescaling bijection carries curvature traces onto flat traces") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, a);
  const Point x1 = pt(0.1, -0.2, 1);
  const Schedule alpha = Schedule::constant(ScheduleRole::alpha, 0.5);
  const Schedule lam = Schedule::constant(ScheduleRole::lambda, 1.0);

  const IterationTrace flat = run_mann(f, space, x1, alpha, lam, 40, 0.0);

  for (const double kappa : {0.25, 4.0, 9.0}) {
    const KappaSpace ks(kappa, space);
    const IterationTrace t =
        run_mann_kappa(f, ks, x1, alpha, lam, 40, 0.0);

    check_same_points(t.iterates, flat.iterates);
    check_same_points(t.resolvent_points, flat.resolvent_points);
    REQUIRE(t.step_records.size() == flat.step_records.size());
    const double root = std::sqrt(kappa);
    for (std::size_t i = 0; i < t.step_records.size(); ++i) {
      const StepRecord& got = t.step_records[i];
      const StepRecord& ref = flat.step_records[i];
      CHECK(got.step_distance * root ==
            doctest::Approx(ref.step_distance).epsilon(1e-12));
      CHECK(got.dist_to_minimizer * root ==
            doctest::Approx(ref.dist_to_minimizer).epsilon(1e-12));
      CHECK(got.alpha == ref.alpha);
      CHECK(got.lambda == ref.lambda);
      CHECK(got.value_at_iterate == ref.value_at_iterate);
      CHECK(got.value_at_resolvent == ref.value_at_resolvent);
    }
    REQUIRE(t.hypothesis_checks.size() == flat.hypothesis_checks.size());
    for (std::size_t i = 0; i < t.hypothesis_checks.size(); ++i) {
      CHECK(t.hypothesis_checks[i].condition ==
            flat.hypothesis_checks[i].condition);
      CHECK(t.hypothesis_checks[i].satisfied ==
            flat.hypothesis_checks[i].satisfied);
    }
    CHECK(t.terminated_reason == flat.terminated_reason);
  }
}

TEST_CASE("anchored runner under curvature matches the flat run") {
  const AdmissibleSpace space = default_space();
  const ConvexFunction f =
      ConvexFunction::neg_cos_distance(space, pt(0.2, 0.1, 1));
  const Point y1 = pt(0.1, -0.2, 1);
  const Point v = pt(-0.15, 0.1, 1);
  const Schedule alpha = Schedule::harmonic(ScheduleRole::alpha, 0.5);
  const Schedule lam = Schedule::linear(ScheduleRole::lambda);

  const KappaSpace ks(4.0, space);
  const IterationTrace t = run_halpern_kappa(f, ks, y1, v, alpha, lam, 60, 0.0);
  const IterationTrace flat = run_halpern(f, space, y1, v, alpha, lam, 60, 0.0);

  check_same_points(t.iterates, flat.iterates);
  REQUIRE(t.anchor);
  CHECK(t.anchor->same_coords(v));
  REQUIRE(t.reference_projection);
  CHECK(t.reference_projection->same_coords(*flat.reference_projection));
  for (std::size_t i = 0; i < t.step_records.size(); ++i) {
    CHECK(t.step_records[i].dist_to_projection * 2.0 ==
          doctest::Approx(flat.step_records[i].dist_to_projection)
              .epsilon(1e-12));
  }
}

TEST_CASE("stopping tolerance is interpreted in curvature units") {
  const AdmissibleSpace space = default_space();
  const ConvexFunction f =
      ConvexFunction::neg_cos_distance(space, pt(0.2, 0.1, 1));
  const Point x1 = pt(0.1, -0.2, 1);
  const Schedule alpha = Schedule::constant(ScheduleRole::alpha, 0.0);
  const Schedule lam = Schedule::constant(ScheduleRole::lambda, 1.0);

  const KappaSpace ks(4.0, space);
  const IterationTrace t = run_mann_kappa(f, ks, x1, alpha, lam, 10000, 1e-6);
  // Model units: the same orbit must stop once a step falls below 2e-6.
  const IterationTrace flat = run_mann(f, space, x1, alpha, lam, 10000, 2e-6);
  CHECK(t.iterates.size() == flat.iterates.size());
  CHECK(t.terminated_reason == TerminationReason::step_below_tolerance);
  CHECK(t.step_records.back().step_distance < 1e-6);
}

TEST_CASE("certificate thresholds scale with the curvature diameter bound") {
  const AdmissibleSpace space = default_space();
  const KappaSpace ks(4.0, space);
  CHECK(ks.metric_scale() == 0.5);
  CHECK(ks.diameter_bound() == kPi / 2.0);
  CHECK(ks.half_diameter_bound() == kPi / 4.0);
  CHECK(ks.d_kappa_radius() == space.radius() / 2.0);

  const Point x = pt(0.1, -0.2, 1);
  const Point y = pt(0.2, 0.1, 1);
  CHECK(ks.distance(x, y) == distance(x, y) / 2.0);

  // Every step of a curvature run clears its own half-diameter bound, the
  // analogue of the flat pi/2 step certificate.
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, y);
  const IterationTrace t = run_mann_kappa(
      f, ks, x, Schedule::constant(ScheduleRole::alpha, 0.5),
      Schedule::constant(ScheduleRole::lambda, 1.0), 40, 0.0);
  for (const StepRecord& r : t.step_records) {
    CHECK(r.step_distance < ks.half_diameter_bound());
  }
}

TEST_CASE("curvature wrapper validates its inputs") {
  const AdmissibleSpace space = default_space();
  CHECK_THROWS_AS(KappaSpace(0.0, space), InvalidInputError);
  CHECK_THROWS_AS(KappaSpace(-1.0, space), InvalidInputError);
  CHECK_THROWS_AS(KappaSpace(std::numeric_limits<double>::quiet_NaN(), space),
                  InvalidInputError);
  CHECK_THROWS_AS(KappaSpace(std::numeric_limits<double>::infinity(), space),
                  InvalidInputError);

  const KappaSpace ks(2.0, space);
  const ConvexFunction f =
      ConvexFunction::neg_cos_distance(space, pt(0.2, 0.1, 1));
  CHECK_THROWS_AS(resolvent_kappa(f, 0.0, pt(0.1, 0, 1), ks),
                  InvalidInputError);
  Vec far(3);
  far << 1, 0, 0.2;
  CHECK_THROWS_AS(resolvent_kappa(f, 1.0, Point::from_unnormalized(far), ks),
                  InvalidInputError);
}
