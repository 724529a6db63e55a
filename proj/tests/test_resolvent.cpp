#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core/convex_function.hpp"
#include "core/errors.hpp"
#include "core/resolvent.hpp"
#include "core/rng.hpp"
#include "core/scalar_min.hpp"

using namespace sphereprox;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Point pt(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return Point::from_unnormalized(std::move(v));
}

AdmissibleSpace default_space() {
  return AdmissibleSpace::with_default_radius(pt(0, 0, 1));
}

Vec cross3(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
      a[0] * b[1] - a[1] * b[0];
  return c;
}

// Orthonormal tangent frame at p (ambient dimension 3).
void frame_at(const Point& p, Vec& e1, Vec& e2) {
  Vec seed(3);
  seed << 1, 0, 0;
  if (std::abs(seed.dot(p.coords())) > 0.9) seed << 0, 1, 0;
  e1 = (seed - seed.dot(p.coords()) * p.coords()).normalized();
  e2 = cross3(p.coords(), e1);
}

double total_objective(const ConvexFunction& f, const Point& x, double lambda,
                       const Point& y) {
  return f.evaluate(y) + (1.0 / lambda) * tan_sin_penalty(distance(y, x));
}

// Test-side verification grid: golden-angle spiral over the whole space,
// built independently of the library's own grid machinery.
std::vector<Point> cap_grid(const AdmissibleSpace& space, double res) {
  Vec e1, e2;
  frame_at(space.pole(), e1, e2);
  const double depth = 1.0 - std::cos(space.radius());
  const int n =
      std::max(64, static_cast<int>(2.0 * kPi * depth / (res * res)));
  const double golden = 2.399963229728653322;
  std::vector<Point> nodes;
  nodes.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double frac = (i + 0.5) / n;
    const double t = std::acos(1.0 - frac * depth);
    const double phi = i * golden;
    nodes.push_back(exp_map(space.pole(),
                            t * (std::cos(phi) * e1 + std::sin(phi) * e2)));
  }
  return nodes;
}

struct CatalogEntry {
  ConvexFunction f;
  // A certified minimizer when a closed form exists; indicator entries have
  // a whole ball of minimizers and sample from it instead.
  std::optional<Point> u;
};

// Three anchors at equal arc radius and equal angular spacing around c:
// the minimax center is c by symmetry, which certifies an argmin for a
// three-term max with no library closed form.
std::vector<Point> equilateral_triple(const Point& c, double rho) {
  Vec e1, e2;
  frame_at(c, e1, e2);
  std::vector<Point> out;
  for (int k = 0; k < 3; ++k) {
    const double phi = 2.0 * kPi * k / 3.0;
    out.push_back(exp_map(c, rho * (std::cos(phi) * e1 + std::sin(phi) * e2)));
  }
  return out;
}

std::vector<CatalogEntry> resolvent_catalog(const AdmissibleSpace& space) {
  const Point a = pt(0.2, 0.1, 1);
  const Point b = pt(-0.2, 0.15, 1);
  const Point c0 = pt(0.05, 0, 1);
  const Point center = pt(0.05, -0.03, 1);

  std::vector<CatalogEntry> out;
  out.push_back({ConvexFunction::neg_cos_distance(space, a), a});
  {
    auto f = ConvexFunction::weighted_neg_cos(space, {a, b}, {1.0, 2.5});
    const Point u = *f.known_minimizer();
    out.push_back({std::move(f), u});
  }
  {
    auto f = ConvexFunction::max_neg_cos(space, {a, b});
    const Point u = *f.known_minimizer();
    out.push_back({std::move(f), u});
  }
  out.push_back(
      {ConvexFunction::max_neg_cos(space, equilateral_triple(center, 0.3)),
       center});
  out.push_back({ConvexFunction::indicator_ball(space, c0, 0.2), std::nullopt});
  {
    auto f = ConvexFunction::sum(
        space, {ConvexFunction::indicator_ball(space, c0, 0.2),
                ConvexFunction::neg_cos_distance(space, b)});
    const Point u = *f.known_minimizer();
    out.push_back({std::move(f), u});
  }
  out.push_back(
      {ConvexFunction::sum(space,
                           {ConvexFunction::indicator_ball(space, c0, 0.2),
                            ConvexFunction::max_neg_cos(space, {a, b})}),
       std::nullopt});
  return out;
}

Point sample_in_constraint_ball(const Ball& ball, const AdmissibleSpace& space,
                                Rng& rng) {
  const Point p = sample_in_ball(space, rng);
  if (distance(ball.center, p) <= ball.radius) return p;
  return point_toward(ball.center, p, ball.radius * rng.uniform());
}

// A minimizer representative for sweep checks: the certified one, or a
// point drawn from the indicator ball (every point of it is an argmin).
Point argmin_for(const CatalogEntry& e, const AdmissibleSpace& space,
                 Rng& rng) {
  if (e.u) return *e.u;
  return sample_in_constraint_ball(e.f.constraint_balls().front(), space, rng);
}

double log_uniform_lambda(Rng& rng) { return std::pow(10.0, rng.uniform(-1.0, 1.0)); }

}  // namespace

TEST_CASE("penalty value and derivative") {
  // Algebraically different form of the same function.
  for (double t = 0.01; t < kPi / 2.0 - 0.01; t += 0.017) {
    const double v = tan_sin_penalty(t);
    const double alt = std::sin(t) * std::sin(t) / std::cos(t);
    CHECK(std::abs(v - alt) <= 1e-14 * (1.0 + std::abs(v)));
  }
  CHECK(tan_sin_penalty(0.0) == 0.0);
  CHECK(tan_sin_penalty_derivative(0.0) == 0.0);
  CHECK(tan_sin_penalty(kPi / 2.0) == kInf);
  CHECK(tan_sin_penalty(2.0) == kInf);
  CHECK(tan_sin_penalty_derivative(kPi / 2.0) == kInf);
  CHECK_THROWS_AS(tan_sin_penalty(-1e-12), InvalidInputError);
  CHECK_THROWS_AS(tan_sin_penalty_derivative(-1.0), InvalidInputError);
  CHECK_THROWS_AS(tan_sin_penalty(std::nan("")), InvalidInputError);

  // Central finite differences; relative tolerance because the derivative
  // blows up toward pi/2.
  for (double t = 0.005; t < 1.55; t += 0.013) {
    const double h = 1e-7;
    const double fd =
        (tan_sin_penalty(t + h) - tan_sin_penalty(t - h)) / (2.0 * h);
    const double an = tan_sin_penalty_derivative(t);
    CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(an)));
    CHECK(an > 0.0);
  }
}

TEST_CASE("lone indicator resolvent is the metric projection") {
  auto space = default_space();
  const Point c0 = pt(0.05, 0, 1);
  const double r0 = 0.2;
  auto f = ConvexFunction::indicator_ball(space, c0, r0);

  // Interior query point: identity, exactly.
  const Point inside = pt(0.1, 0.05, 1);
  REQUIRE(distance(c0, inside) < r0);
  const ResolventResult ri = resolvent({f, space, inside, 1.0});
  CHECK(ri.minimizer.same_coords(inside));
  CHECK(ri.inner_residual == 0.0);
  CHECK(ri.cosine_c == 1.0);
  CHECK(ri.penalty_distance <= 1e-15);
  CHECK(ri.iterations == 0);
  // The objective re-evaluates the penalty at the ~1e-16 self-distance.
  CHECK(ri.objective <= 1e-30);

  // Exterior query point: closed-form nearest point of the ball, for any
  // lambda.
  Rng rng(71);
  for (int i = 0; i < 50; ++i) {
    const Point x = sample_in_ball(space, rng);
    if (distance(c0, x) <= r0) continue;
    const Point closed = point_toward(c0, x, r0);
    const ResolventResult r1 = resolvent({f, space, x, 0.1});
    const ResolventResult r2 = resolvent({f, space, x, 10.0});
    CHECK(distance(r1.minimizer, closed) <= 1e-9);
    CHECK(r1.minimizer.same_coords(r2.minimizer));  // lambda-independent
    CHECK(r1.inner_residual <= 1e-10);
    CHECK(r1.penalty_distance ==
          doctest::Approx(distance(x, closed)).epsilon(1e-12));

    // Quasi-firmness at the ball center, closed-form case.
    CHECK(check_quasi_firm({f, space, x, 1.0}, c0) >= 0.0);
  }
}

TEST_CASE("constrained smooth resolvent matches a nearest-point closed form") {
  // indicator(ball) + (1 - cos d(., z)) queried at x = z with z outside the
  // ball: every addend grows with d(y, z), so the minimizer is the ball's
  // nearest point to z. Exercises the constrained descent path against an
  // independent closed form.
  auto space = default_space();
  const Point c0 = pt(0.05, 0, 1);
  const double r0 = 0.2;
  const Point z = pt(-0.25, 0.2, 1);
  REQUIRE(distance(c0, z) > r0 + 0.05);
  auto f = ConvexFunction::sum(space,
                               {ConvexFunction::indicator_ball(space, c0, r0),
                                ConvexFunction::neg_cos_distance(space, z)});
  const Point closed = point_toward(c0, z, r0);
  for (const double lambda : {0.1, 1.0, 10.0}) {
    const ResolventResult r = resolvent({f, space, z, lambda});
    CHECK(distance(r.minimizer, closed) <= 1e-9);
    CHECK(r.inner_residual <= 1e-10);
  }
}

TEST_CASE("fixed points of the resolvent") {
  auto space = default_space();
  Rng rng(5);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    if (!e.u) continue;
    for (const double lambda : {0.1, 1.0, 10.0}) {
      const ResolventResult r = resolvent({e.f, space, *e.u, lambda});
      CHECK(distance(r.minimizer, *e.u) <= 1e-6);
      CHECK(r.inner_residual <= 1e-10);
    }
  }

  // The smooth path is dimension-generic; check a fixed point in ambient
  // dimension 4.
  Vec p4(4);
  p4 << 0, 0, 0, 1;
  auto space4 = AdmissibleSpace::with_default_radius(Point::from_unnormalized(p4));
  Vec a4(4), b4(4);
  a4 << 0.1, -0.05, 0.08, 1;
  b4 << -0.12, 0.07, 0.0, 1;
  auto f4 = ConvexFunction::weighted_neg_cos(
      space4,
      {Point::from_unnormalized(a4), Point::from_unnormalized(b4)},
      {1.0, 2.0});
  const Point u4 = *f4.known_minimizer();
  const ResolventResult r4 = resolvent({f4, space4, u4, 1.0});
  CHECK(distance(r4.minimizer, u4) <= 1e-6);

  Vec x4(4);
  x4 << -0.1, 0.1, 0.05, 1;
  const ResolventQuery q4{f4, space4, Point::from_unnormalized(x4), 0.7};
  const ResolventResult g4 = resolvent(q4);
  CHECK(g4.inner_residual <= 1e-10);
  Rng rng4(17);
  CHECK(verify_local_optimality(q4, g4, rng4) <= 1e-8);
}

TEST_CASE("general solver agrees with the scalar geodesic reduction") {
  auto space = default_space();
  Vec e1, e2;
  frame_at(space.pole(), e1, e2);
  const Point z = exp_map(space.pole(), 0.25 * e1);
  const Point x = exp_map(space.pole(), -0.25 * e1);
  const double big = distance(x, z);
  CHECK(big == doctest::Approx(0.5).epsilon(1e-12));

  auto f = ConvexFunction::neg_cos_distance(space, z);

  // Scalar oracle: golden section on g, then a derivative bisection (value
  // comparisons alone cannot place the abscissa better than ~1e-8).
  const auto g = [&](double t) {
    return 1.0 - std::cos(big - t) + tan_sin_penalty(t);
  };
  const auto gs = [&](double t) {
    return -std::sin(big - t) + tan_sin_penalty_derivative(t);
  };
  golden_section_min(g, 0.0, big, 1e-12);
  double lo = 0.0, hi = big;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gs(mid) < 0.0 ? lo : hi) = mid;
  }
  const double t_star = 0.5 * (lo + hi);
  CHECK(t_star > 0.0);
  CHECK(t_star < big);
  const Point predicted = point_toward(x, z, t_star);

  const ResolventResult general = resolvent({f, space, x, 1.0});
  CHECK(distance(general.minimizer, predicted) <= 1e-8);
  const ResolventResult scalar = resolvent_on_geodesic(f, 1.0, x, z);
  CHECK(distance(scalar.minimizer, predicted) <= 1e-9);
  CHECK(scalar.inner_residual <= 1e-10);

  // Cross-oracle equivalence on random queries.
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const Point anchor = sample_in_ball(space, rng);
    const Point start = sample_in_ball(space, rng);
    const double lambda = log_uniform_lambda(rng);
    auto fn = ConvexFunction::neg_cos_distance(space, anchor);
    const ResolventResult ra = resolvent({fn, space, start, lambda});
    const ResolventResult rb = resolvent_on_geodesic(fn, lambda, start, anchor);
    CHECK(distance(ra.minimizer, rb.minimizer) <= 1e-7);
    CHECK(rb.inner_residual <= 1e-10);
  }
}

TEST_CASE("geodesic resolvent extremes and degenerate start") {
  auto space = default_space();
  Vec e1, e2;
  frame_at(space.pole(), e1, e2);
  const Point z = exp_map(space.pole(), 0.25 * e1);
  const Point x = exp_map(space.pole(), -0.25 * e1);
  auto f = ConvexFunction::neg_cos_distance(space, z);

  const ResolventResult big_lambda = resolvent_on_geodesic(f, 1e6, x, z);
  CHECK(distance(big_lambda.minimizer, z) <= 1e-3);
  const ResolventResult small_lambda = resolvent_on_geodesic(f, 1e-6, x, z);
  CHECK(distance(small_lambda.minimizer, x) <= 1e-3);

  // Start at the anchor itself: nothing to do.
  const ResolventResult at_anchor = resolvent_on_geodesic(f, 1.0, z, z);
  CHECK(at_anchor.minimizer.same_coords(z));
  CHECK(at_anchor.inner_residual == 0.0);
  CHECK(at_anchor.cosine_c == 1.0);
  CHECK(at_anchor.iterations == 0);

  double prev = -1.0;
  for (const double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const ResolventResult r = resolvent_on_geodesic(f, lambda, x, z);
    CHECK(r.penalty_distance >= prev - 1e-8);
    prev = r.penalty_distance;
  }
}

TEST_CASE("penalty distance grows with lambda") {
  auto space = default_space();
  Rng rng(37);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    const Point x = sample_in_ball(space, rng);
    double prev = -1.0;
    for (const double lambda : {0.05, 0.1, 0.5, 1.0, 2.0, 10.0}) {
      const ResolventResult r = resolvent({e.f, space, x, lambda});
      CHECK(r.penalty_distance >= prev - 1e-8);
      prev = r.penalty_distance;
    }
  }
}

TEST_CASE("resolvent results are internally consistent") {
  auto space = default_space();
  Rng rng(41);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    for (int i = 0; i < 25; ++i) {
      const Point x = sample_in_ball(space, rng);
      const double lambda = log_uniform_lambda(rng);
      const ResolventQuery q{e.f, space, x, lambda};
      const ResolventResult r = resolvent(q);
      CHECK(space.contains(r.minimizer));
      CHECK(r.penalty_distance < kPi / 2.0);
      CHECK(r.cosine_c > 0.0);
      CHECK(r.cosine_c <= 1.0);
      CHECK(r.cosine_c == std::cos(r.penalty_distance));
      CHECK(r.objective == e.f.evaluate(r.minimizer) +
                               (1.0 / lambda) *
                                   tan_sin_penalty(r.penalty_distance));
      CHECK(r.inner_residual <= 1e-10);

      // Determinism: the same query reproduces the result bit for bit.
      const ResolventResult again = resolvent(q);
      CHECK(again.minimizer.same_coords(r.minimizer));
      CHECK(again.objective == r.objective);
      CHECK(again.inner_residual == r.inner_residual);
    }
  }
}

TEST_CASE("resolvent minimizer beats a verification grid") {
  auto space = default_space();
  const std::vector<Point> grid = cap_grid(space, 5e-3);
  Rng rng(53);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    for (const double lambda : {0.3, 3.0}) {
      const Point x = sample_in_ball(space, rng);
      const ResolventQuery q{e.f, space, x, lambda};
      const ResolventResult r = resolvent(q);
      const double at_min = total_objective(e.f, x, lambda, r.minimizer);
      double best_node = kInf;
      for (const Point& node : grid) {
        best_node = std::min(best_node, total_objective(e.f, x, lambda, node));
      }
      CHECK(at_min <= best_node + 1e-8);
      CHECK(verify_local_optimality(q, r, rng) <= 1e-8);
    }
  }
}

TEST_CASE("quasi-firmness holds across the catalog") {
  auto space = default_space();
  Rng rng(61);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    if (!e.u && e.f.has_max_part()) continue;  // no certified argmin
    for (int i = 0; i < 200; ++i) {
      const Point u = argmin_for(e, space, rng);
      const Point x = sample_in_ball(space, rng);
      const double lambda = log_uniform_lambda(rng);
      CHECK(check_quasi_firm({e.f, space, x, lambda}, u) >= -1e-8);
    }
    // Fixed point: both sides collapse and the residual is exactly zero.
    const Point u0 =
        e.u ? *e.u : e.f.constraint_balls().front().center;
    CHECK(check_quasi_firm({e.f, space, u0, 1.0}, u0) == 0.0);
  }
}

TEST_CASE("two-point firmness holds across the catalog") {
  auto space = default_space();
  Rng rng(67);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    for (int i = 0; i < 100; ++i) {
      const Point x1 = sample_in_ball(space, rng);
      const Point x2 = sample_in_ball(space, rng);
      const ResolventQuery q1{e.f, space, x1, log_uniform_lambda(rng)};
      const ResolventQuery q2{e.f, space, x2, log_uniform_lambda(rng)};
      CHECK(check_firm_pair(q1, q2) >= -1e-8);
    }
    // Identical queries: both sides coincide.
    const Point x = sample_in_ball(space, rng);
    const ResolventQuery q{e.f, space, x, 0.8};
    CHECK(std::abs(check_firm_pair(q, q)) <= 1e-10);
  }

  // With both weights at one the expression reduces to the single-weight
  // inequality; recompute that form directly and compare.
  const auto catalog = resolvent_catalog(space);
  const auto& f = catalog[0].f;
  for (int i = 0; i < 20; ++i) {
    const Point x1 = sample_in_ball(space, rng);
    const Point x2 = sample_in_ball(space, rng);
    const ResolventQuery q1{f, space, x1, 1.0};
    const ResolventQuery q2{f, space, x2, 1.0};
    const ResolventResult r1 = resolvent(q1);
    const ResolventResult r2 = resolvent(q2);
    const double cx = r1.cosine_c, cy = r2.cosine_c;
    const double reduced =
        (cx * cx * (1.0 + cy * cy) * cy + cy * cy * (1.0 + cx * cx) * cx) *
            cos_distance(r1.minimizer, r2.minimizer) -
        (cx * cx * (1.0 + cy * cy) * cos_distance(r1.minimizer, x2) +
         cy * cy * (1.0 + cx * cx) * cos_distance(r2.minimizer, x1));
    CHECK(std::abs(check_firm_pair(q1, q2) - reduced) <= 1e-12);
  }
}

TEST_CASE("strong quasi-firmness holds across the catalog") {
  auto space = default_space();
  Rng rng(73);
  for (const CatalogEntry& e : resolvent_catalog(space)) {
    if (!e.u && e.f.has_max_part()) continue;
    for (int i = 0; i < 100; ++i) {
      const Point u = argmin_for(e, space, rng);
      const Point x = sample_in_ball(space, rng);
      const double lambda = log_uniform_lambda(rng);
      CHECK(check_sq_firm({e.f, space, x, lambda}, u) >= -1e-8);
    }
    const Point u0 =
        e.u ? *e.u : e.f.constraint_balls().front().center;
    CHECK(std::abs(check_sq_firm({e.f, space, u0, 1.0}, u0)) <= 1e-12);
  }

  // Lambda sweep at a fixed query point.
  const auto catalog = resolvent_catalog(space);
  const Point x = pt(-0.15, -0.1, 1);
  for (const double lambda : {0.1, 1.0, 10.0}) {
    CHECK(check_sq_firm({catalog[0].f, space, x, lambda},
                        *catalog[0].u) >= -1e-8);
  }
}

TEST_CASE("resolvent input validation") {
  auto space = default_space();
  auto f = ConvexFunction::neg_cos_distance(space, pt(0.2, 0.1, 1));
  const Point x = pt(-0.1, 0.1, 1);

  CHECK_THROWS_AS(resolvent({f, space, x, 0.0}), InvalidInputError);
  CHECK_THROWS_AS(resolvent({f, space, x, -1.0}), InvalidInputError);
  CHECK_THROWS_AS(resolvent({f, space, x, kInf}), InvalidInputError);
  CHECK_THROWS_AS(resolvent({f, space, x, std::nan("")}), InvalidInputError);

  // Query point outside the space.
  Vec e1, e2;
  frame_at(space.pole(), e1, e2);
  const Point outside = exp_map(space.pole(), (space.radius() + 0.05) * e1);
  CHECK_THROWS_AS(resolvent({f, space, outside, 1.0}), InvalidInputError);

  // Query space differing from the function's space.
  auto narrow = AdmissibleSpace(space.pole(), 0.3);
  CHECK_THROWS_AS(resolvent({f, narrow, pt(0.05, 0, 1), 1.0}),
                  InvalidInputError);

  // Geodesic path preconditions.
  auto w = ConvexFunction::weighted_neg_cos(space, {pt(0.2, 0.1, 1)}, {2.0});
  CHECK_THROWS_AS(resolvent_on_geodesic(w, 1.0, x, pt(0.2, 0.1, 1)),
                  InvalidInputError);
  CHECK_THROWS_AS(resolvent_on_geodesic(f, 1.0, x, pt(0.21, 0.1, 1)),
                  InvalidInputError);
  CHECK_THROWS_AS(resolvent_on_geodesic(f, -2.0, x, pt(0.2, 0.1, 1)),
                  InvalidInputError);

  // Max objectives are enumerated in ambient dimension 3 only.
  Vec p4(4);
  p4 << 0, 0, 0, 1;
  auto space4 = AdmissibleSpace::with_default_radius(Point::from_unnormalized(p4));
  Vec a4(4), b4(4);
  a4 << 0.1, 0, 0, 1;
  b4 << 0, 0.1, 0, 1;
  auto mx4 = ConvexFunction::max_neg_cos(
      space4, {Point::from_unnormalized(a4), Point::from_unnormalized(b4)});
  CHECK_THROWS_AS(resolvent({mx4, space4, space4.pole(), 1.0}),
                  NotImplementedError);

  // At most one multi-anchor max addend is supported.
  auto two_max = ConvexFunction::sum(
      space, {ConvexFunction::max_neg_cos(space, {pt(0.2, 0, 1), pt(0, 0.2, 1)}),
              ConvexFunction::max_neg_cos(space,
                                          {pt(-0.2, 0, 1), pt(0, -0.2, 1)})});
  CHECK_THROWS_AS(resolvent({two_max, space, x, 1.0}), NotImplementedError);
}
