#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "core/algorithms.hpp"
#include "core/convex_function.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/rng.hpp"

using namespace sphereprox;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Point pt(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return Point::from_unnormalized(std::move(v));
}

AdmissibleSpace default_space() {
  return AdmissibleSpace::with_default_radius(pt(0, 0, 1));
}

// Hand-built trace sitting at one point; alpha = 1/2 keeps the residual
// arithmetic exact in binary.
IterationTrace constant_trace(const Point& u, int steps, SchemeKind scheme) {
  IterationTrace t;
  t.scheme = scheme;
  t.iterates.assign(static_cast<std::size_t>(steps) + 1, u);
  t.resolvent_points.assign(static_cast<std::size_t>(steps), u);
  for (int n = 1; n <= steps; ++n) {
    StepRecord r;
    r.n = n;
    r.alpha = scheme == SchemeKind::ppa ? 0.0 : 0.5;
    r.lambda = 1.0;
    r.step_distance = 0.0;
    r.value_at_iterate = 0.0;
    r.value_at_resolvent = 0.0;
    r.dist_to_minimizer = 0.0;
    r.dist_to_projection = kNaN;
    t.step_records.push_back(r);
  }
  t.terminated_reason = TerminationReason::reached_iteration_cap;
  return t;
}

// Test-side evaluation of the averaged cosine, independent of the library's
// clustering and grid machinery.
double g_value(const std::vector<Point>& zs, const std::vector<double>& betas,
               const Point& y) {
  double acc = 0.0, total = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    acc += betas[i] * cos_distance(y, zs[i]);
    total += betas[i];
  }
  return acc / total;
}

// Exact maximizer of the linearized objective <y, M> over the cap: since
// cos d(y, z) = <y, z> on the unit sphere, the averaged cosine is linear in
// ambient coordinates and its cap maximizer has a closed form.
Point linear_max_on_cap(const AdmissibleSpace& space, const Vec& m) {
  const Point dir = Point::from_unnormalized(m);
  if (space.contains(dir)) return dir;
  return point_toward(space.pole(), dir, space.radius());
}

IterationTrace mann_reference_run(const AdmissibleSpace& space,
                                  const Point& a, int n, double x1_angle) {
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, a);
  Vec e1(3), e2(3);
  e1 << 1, 0, 0;
  e1 = (e1 - e1.dot(a.coords()) * a.coords()).normalized();
  e2 << a.coords()[1] * e1[2] - a.coords()[2] * e1[1],
      a.coords()[2] * e1[0] - a.coords()[0] * e1[2],
      a.coords()[0] * e1[1] - a.coords()[1] * e1[0];
  const Point x1 = exp_map(
      a, 0.4 * (std::cos(x1_angle) * e1 + std::sin(x1_angle) * e2));
  return run_mann(f, space, x1,
                  Schedule::constant(ScheduleRole::alpha, 0.5),
                  Schedule::constant(ScheduleRole::lambda, 1.0), n, 0.0);
}

}  // namespace

TEST_CASE("asymptotic center of a constant sequence is the point itself") {
  const AdmissibleSpace space = default_space();
  const Point p = pt(0.15, -0.1, 1);
  const std::vector<Point> seq(12, p);

  const AsymptoticCenterEstimate est = asymptotic_center(seq, 0, space);
  CHECK(distance(est.center, p) <= 1e-6);
  CHECK(est.radius_estimate <= 1e-12);
  CHECK(est.tail_start == 0);
  CHECK(est.grid_resolution == kDefaultGridResolution);
  CHECK(space.contains(est.center));
}

TEST_CASE("asymptotic center of an alternating pair is the midpoint") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const Point b = pt(-0.15, 0.2, 1);
  std::vector<Point> seq;
  for (int i = 0; i < 10; ++i) {
    seq.push_back(a);
    seq.push_back(b);
  }

  const AsymptoticCenterEstimate est = asymptotic_center(seq, 0, space);
  const Point mid = interpolate(a, b, 0.5);
  CHECK(distance(est.center, mid) <= 1e-4);
  CHECK(est.radius_estimate ==
        doctest::Approx(distance(a, b) / 2.0).epsilon(1e-6));
  // No point of the space does better than the midpoint.
  CHECK(est.radius_estimate >= distance(a, b) / 2.0 - 1e-9);
}

TEST_CASE("asymptotic center of a convergent orbit finds the minimizer") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const IterationTrace t = mann_reference_run(space, a, 200, 1.1);

  const int half = default_tail_start(t.iterates.size());
  const AsymptoticCenterEstimate est =
      asymptotic_center(t.iterates, half, space);
  CHECK(distance(est.center, a) <= 2.0 * kDefaultGridResolution);
  CHECK(est.radius_estimate <= 1e-6);

  // Stability: doubling the tail start barely moves the center.
  const AsymptoticCenterEstimate earlier =
      asymptotic_center(t.iterates, half / 2, space);
  CHECK(distance(est.center, earlier.center) <= 2.0 * kDefaultGridResolution);
}

TEST_CASE("asymptotic center validates its inputs") {
  const AdmissibleSpace space = default_space();
  const Point p = pt(0.1, 0.1, 1);

  CHECK_THROWS_AS(asymptotic_center(std::vector<Point>(9, p), 0, space),
                  InvalidInputError);
  CHECK_THROWS_AS(asymptotic_center(std::vector<Point>(30, p), 21, space),
                  InvalidInputError);
  CHECK_THROWS_AS(asymptotic_center(std::vector<Point>(12, p), -1, space),
                  InvalidInputError);
  CHECK_THROWS_AS(asymptotic_center(std::vector<Point>(12, p), 0, space, 1e-6),
                  InvalidInputError);

  Vec four(4);
  four << 0, 0, 0, 1;
  const AdmissibleSpace space4 =
      AdmissibleSpace::with_default_radius(Point::from_unnormalized(four));
  Vec off(4);
  off << 0.1, 0, 0, 1;
  const std::vector<Point> seq4(12, Point::from_unnormalized(off));
  CHECK_THROWS_AS(asymptotic_center(seq4, 0, space4), NotImplementedError);
}

TEST_CASE("boundedness certificate on a convergent run") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const IterationTrace t = mann_reference_run(space, a, 200, 0.4);

  const int half = default_tail_start(t.resolvent_points.size());
  const BoundednessCertificate cert =
      boundedness_certificate(t, half, space);
  CHECK(cert.spherically_bounded_estimate);
  CHECK(cert.tail_inf_sup <= 1e-6);
  CHECK(cert.sup_step_distance < kPi / 2.0);
  CHECK(cert.sup_step_distance ==
        doctest::Approx(t.step_records.front().step_distance)
            .epsilon(1e-12));  // the first step is the largest here
  CHECK(cert.tail_start == half);
}

TEST_CASE("boundedness certificate reads the injected step supremum") {
  const AdmissibleSpace space = default_space();
  IterationTrace t;
  t.scheme = SchemeKind::mann;
  const int n = 15;
  t.iterates.assign(n + 1, space.pole());
  for (int k = 0; k < n; ++k) {
    // Proximal points marching outward toward the ball boundary.
    Vec dir(3);
    dir << 1, 0, 0;
    t.resolvent_points.push_back(
        exp_map(space.pole(), (0.1 + 0.04 * k) * dir));
    StepRecord r;
    r.n = k + 1;
    r.alpha = 0.5;
    r.lambda = 1.0;
    // Step distances creeping toward pi/2 without reaching it.
    r.step_distance = 1.55 - 0.01 * (n - 1 - k);
    r.value_at_iterate = 0.0;
    r.value_at_resolvent = 0.0;
    r.dist_to_minimizer = kNaN;
    r.dist_to_projection = kNaN;
    t.step_records.push_back(r);
  }

  const BoundednessCertificate cert = boundedness_certificate(t, 0, space);
  CHECK(cert.sup_step_distance == 1.55);
  // The tail spreads over an arc of about 0.56, so its covering radius is
  // far below the admissibility threshold.
  CHECK(cert.tail_inf_sup ==
        doctest::Approx((0.1 + 0.04 * (n - 1) - 0.1) / 2.0).epsilon(1e-3));
  CHECK(cert.spherically_bounded_estimate);
}

TEST_CASE("boundedness certificate of a constant trace reports zero spread") {
  const AdmissibleSpace space = default_space();
  const Point u = pt(0.1, 0.05, 1);
  const IterationTrace t = constant_trace(u, 12, SchemeKind::mann);
  const BoundednessCertificate cert = boundedness_certificate(t, 0, space);
  CHECK(cert.tail_inf_sup <= 1e-12);
  CHECK(cert.sup_step_distance == 0.0);
  CHECK(cert.spherically_bounded_estimate);
}

TEST_CASE("averaged cosine of coincident points peaks at the point with value one") {
  const AdmissibleSpace space = default_space();
  const Point p = pt(-0.12, 0.08, 1);
  const std::vector<Point> zs(12, p);
  const std::vector<double> betas(12, 0.3);

  const GFunctionEstimate est = g_maximizer(zs, betas, space);
  CHECK(est.max_value == 1.0);
  CHECK(distance(est.maximizer, p) <= 1e-6);
  REQUIRE(est.sigma_n.size() == 12);
  CHECK(est.sigma_n.front() == 0.3);
  CHECK(est.sigma_n.back() == doctest::Approx(3.6).epsilon(1e-15));
  CHECK(est.beta_weights == betas);
}

TEST_CASE("averaged cosine maximizer leans toward the heavier cluster") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.25, 0.05, 1);
  const Point b = pt(-0.2, -0.1, 1);
  std::vector<Point> zs;
  for (int i = 0; i < 9; ++i) zs.push_back(a);
  for (int i = 0; i < 3; ++i) zs.push_back(b);
  const std::vector<double> betas(12, 1.0);

  const GFunctionEstimate est = g_maximizer(zs, betas, space);
  CHECK(distance(est.maximizer, a) < distance(est.maximizer, b));

  // Cross-check against the exact maximizer of the linearized objective.
  Vec m = Vec::Zero(3);
  for (const Point& z : zs) m += z.coords();
  const Point exact = linear_max_on_cap(space, m);
  CHECK(distance(est.maximizer, exact) <= 1e-4);
  CHECK(est.max_value ==
        doctest::Approx(g_value(zs, betas, exact)).epsilon(1e-9));
  CHECK(est.max_value > 0.0);
  CHECK(est.max_value <= 1.0);
}

TEST_CASE("averaged cosine maximizer of a convergent run sits near the limit") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const IterationTrace t = mann_reference_run(space, a, 500, 2.0);

  const std::vector<double> betas = g_weights_from_trace(t);
  REQUIRE(betas.size() == t.step_records.size());
  // Spot-check the weight formula on the first record.
  {
    const StepRecord& r = t.step_records.front();
    const double c = std::cos(r.step_distance);
    CHECK(betas.front() ==
          (1.0 - r.alpha) * r.lambda * c * c / (1.0 + c * c));
    CHECK(betas.front() > 0.0);
  }

  const GFunctionEstimate est =
      g_maximizer(t.resolvent_points, betas, space);
  CHECK(distance(est.maximizer, a) <= 2.0 * kDefaultGridResolution);
  CHECK(est.max_value > 0.99);
  CHECK(est.max_value <= 1.0);

  // The early far-away proximal points bias the maximizer away from the
  // limit by an amount that shrinks like 1/N.
  const GFunctionEstimate shorter = g_maximizer(
      std::vector<Point>(t.resolvent_points.begin(),
                         t.resolvent_points.begin() + 60),
      std::vector<double>(betas.begin(), betas.begin() + 60), space);
  CHECK(distance(est.maximizer, a) < distance(shorter.maximizer, a));
}

TEST_CASE("averaged cosine is 1-Lipschitz and geodesically concave") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const IterationTrace t = mann_reference_run(space, a, 80, -0.3);
  const std::vector<double> betas = g_weights_from_trace(t);
  const std::vector<Point>& zs = t.resolvent_points;

  Rng rng(411u);
  for (int i = 0; i < 500; ++i) {
    const Point y1 = sample_in_ball(space, rng);
    const Point y2 = sample_in_ball(space, rng);
    const double g1 = g_value(zs, betas, y1);
    const double g2 = g_value(zs, betas, y2);
    CHECK(std::abs(g1 - g2) <= distance(y1, y2) + 1e-10);
    if (i < 200) {
      const double w = rng.uniform(0.0, 1.0);
      const double gm = g_value(zs, betas, interpolate(y1, y2, w));
      CHECK(gm >= w * g1 + (1.0 - w) * g2 - 1e-10);
    }
  }
}

TEST_CASE("averaged cosine estimate validates its inputs") {
  const AdmissibleSpace space = default_space();
  const Point p = pt(0.1, 0.0, 1);
  const std::vector<Point> ok(12, p);

  CHECK_THROWS_AS(g_maximizer(std::vector<Point>(9, p),
                              std::vector<double>(9, 1.0), space),
                  InvalidInputError);
  CHECK_THROWS_AS(g_maximizer(ok, std::vector<double>(11, 1.0), space),
                  InvalidInputError);
  std::vector<double> bad(12, 1.0);
  bad[4] = 0.0;
  CHECK_THROWS_AS(g_maximizer(ok, bad, space), InvalidInputError);
  bad[4] = -2.0;
  CHECK_THROWS_AS(g_maximizer(ok, bad, space), InvalidInputError);
  CHECK_THROWS_AS(g_maximizer(ok, std::vector<double>(12, 1.0), space, 0.5),
                  InvalidInputError);

  IterationTrace empty;
  CHECK_THROWS_AS(g_weights_from_trace(empty), InvalidInputError);
}

TEST_CASE("inequality report of a constant trace is exactly zero") {
  const AdmissibleSpace space = default_space();
  const Point u = pt(0.1, 0.05, 1);
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, u);

  for (const SchemeKind scheme : {SchemeKind::ppa, SchemeKind::mann}) {
    const IterationTrace t = constant_trace(u, 12, scheme);
    const TraceInequalityReport rep = check_trace_inequalities(t, f, u);
    REQUIRE(rep.quasi_firm.size() == 12);
    REQUIRE(rep.cosine_update.size() == 12);
    REQUIRE(rep.fejer.size() == 12);
    CHECK(rep.proximal_chain.empty());
    for (double r : rep.quasi_firm) CHECK(r == 0.0);
    for (double r : rep.cosine_update) CHECK(r == 0.0);
    for (double r : rep.fejer) CHECK(r == 0.0);
    CHECK(rep.min_residual == 0.0);
    CHECK(rep.pass);
  }
}

TEST_CASE("inequality report passes on live runs of every scheme") {
  const AdmissibleSpace space = default_space();
  const Point a = pt(0.2, 0.1, 1);
  const Point b = pt(-0.2, 0.15, 1);
  const Point x1 = pt(0.1, -0.2, 1);
  const Schedule lam = Schedule::constant(ScheduleRole::lambda, 1.0);

  // Plain proximal orbit.
  {
    const ConvexFunction f = ConvexFunction::neg_cos_distance(space, a);
    const IterationTrace t = run_ppa(f, space, x1, lam, 60);
    const TraceInequalityReport rep = check_trace_inequalities(t, f, a);
    CHECK(rep.pass);
    CHECK(rep.proximal_chain.empty());
  }

  // Averaged orbits over functions with certified minimizers.
  {
    const ConvexFunction f =
        ConvexFunction::weighted_neg_cos(space, {a, b}, {1.0, 2.5});
    const IterationTrace t = run_mann(
        f, space, x1, Schedule::constant(ScheduleRole::alpha, 0.5), lam, 80);
    const TraceInequalityReport rep =
        check_trace_inequalities(t, f, *f.known_minimizer());
    CHECK(rep.pass);
    CHECK(rep.min_residual >= -1e-8);
  }
  {
    const ConvexFunction f = ConvexFunction::sum(
        space, {ConvexFunction::indicator_ball(space, pt(0.05, 0, 1), 0.2),
                ConvexFunction::neg_cos_distance(space, b)});
    const IterationTrace t = run_mann(
        f, space, x1, Schedule::constant(ScheduleRole::alpha, 0.25), lam, 80);
    const TraceInequalityReport rep =
        check_trace_inequalities(t, f, *f.known_minimizer());
    CHECK(rep.pass);
  }

  // Anchored orbit, checked against the anchor's projection.
  {
    const ConvexFunction f = ConvexFunction::neg_cos_distance(space, a);
    const Point v = pt(-0.15, 0.1, 1);
    const IterationTrace t = run_halpern(
        f, space, x1, v, Schedule::harmonic(ScheduleRole::alpha, 0.5),
        Schedule::linear(ScheduleRole::lambda), 200);
    REQUIRE(t.reference_projection);
    const TraceInequalityReport rep =
        check_trace_inequalities(t, f, *t.reference_projection);
    CHECK(rep.pass);
    CHECK(rep.proximal_chain.size() == t.step_records.size());
  }
}

TEST_CASE("inequality report validates trace shape and reference point") {
  const AdmissibleSpace space = default_space();
  const Point u = pt(0.1, 0.05, 1);
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, u);

  IterationTrace t = constant_trace(u, 12, SchemeKind::mann);
  IterationTrace broken = t;
  broken.resolvent_points.pop_back();
  CHECK_THROWS_AS(check_trace_inequalities(broken, f, u), InvalidInputError);

  IterationTrace empty;
  empty.iterates.push_back(u);
  CHECK_THROWS_AS(check_trace_inequalities(empty, f, u), InvalidInputError);

  IterationTrace anchorless = t;
  anchorless.scheme = SchemeKind::halpern;
  CHECK_THROWS_AS(check_trace_inequalities(anchorless, f, u),
                  InvalidInputError);

  Vec far(3);
  far << 1, 0, 0.2;
  CHECK_THROWS_AS(
      check_trace_inequalities(t, f, Point::from_unnormalized(far)),
      InvalidInputError);
}
