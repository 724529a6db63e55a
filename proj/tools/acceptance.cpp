// Acceptance gate: ten criteria covering the geometry inequalities, the
// resolvent contracts, the averaged and anchored runs, the diagnostics, the
// curvature rescaling, and output determinism. Prints one verdict line per
// criterion and exits 0 only when every one passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/algorithms.hpp"
#include "core/catk.hpp"
#include "core/convex_function.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/geometry.hpp"
#include "core/resolvent.hpp"
#include "core/rng.hpp"

namespace {

using namespace sphereprox;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

AdmissibleSpace make_space() {
  return AdmissibleSpace::with_default_radius(
      Point::from_unnormalized((Vec(3) << 0.0, 0.0, 1.0).finished()));
}

struct CatalogEntry {
  std::string name;
  ConvexFunction f;
};

std::vector<CatalogEntry> make_catalog(const AdmissibleSpace& space) {
  const Point a = Point::from_unnormalized((Vec(3) << 0.2, 0.1, 1.0).finished());
  const Point b =
      Point::from_unnormalized((Vec(3) << -0.2, 0.15, 1.0).finished());
  const Point c0 =
      Point::from_unnormalized((Vec(3) << 0.05, 0.0, 1.0).finished());
  std::vector<CatalogEntry> cat;
  cat.push_back({"neg_cos", ConvexFunction::neg_cos_distance(space, a)});
  cat.push_back(
      {"weighted", ConvexFunction::weighted_neg_cos(space, {a, b}, {1.0, 2.5})});
  cat.push_back({"max", ConvexFunction::max_neg_cos(space, {a, b})});
  cat.push_back(
      {"sum", ConvexFunction::sum(
                  space, {ConvexFunction::indicator_ball(space, c0, 0.2),
                          ConvexFunction::neg_cos_distance(space, b)})});
  return cat;
}

// A unit tangent at base pointing along the first axis (Gram-Schmidt).
Vec axis_tangent(const Point& base) {
  Vec e1 = Vec::Zero(base.dim());
  e1(0) = 1.0;
  Vec t = e1 - e1.dot(base.coords()) * base.coords();
  return t / t.norm();
}

// --- criterion 1: comparison inequalities -----------------------------------

Verdict criterion_geometry() {
  const AdmissibleSpace space = make_space();
  Rng rng(101);
  double worst = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const Point x1 = sample_in_ball(space, rng);
    const Point x2 = sample_in_ball(space, rng);
    const Point x3 = sample_in_ball(space, rng);
    const double alpha = rng.uniform();
    worst = std::min(worst, cos_combination_residual(x1, x2, x3, alpha));
    worst = std::min(worst, sine_comparison_residual(x1, x2, x3, alpha));
    worst = std::min(worst, half_angle_comparison_residual(x1, x2, x3, alpha));
  }
  return {worst >= -1e-10,
          "min residual " + fmt(worst) + " over 1000 samples x 3 inequalities"
          " (>= -1e-10)"};
}

// --- criterion 2: resolvent against closed forms and the 1D oracle ----------

Verdict criterion_resolvent_correctness() {
  const AdmissibleSpace space = make_space();
  double proj_err = 0.0;
  {
    Rng rng(202);
    const AdmissibleSpace inner(space.pole(), space.radius() * 0.5);
    for (int i = 0; i < 100; ++i) {
      const Point center = sample_in_ball(inner, rng);
      const double r = rng.uniform(0.05, 0.25);
      const Point x = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const ConvexFunction f = ConvexFunction::indicator_ball(space, center, r);
      const Point got = resolvent({f, space, x, lam}).minimizer;
      const Point want =
          distance(center, x) <= r ? x : point_toward(center, x, r);
      proj_err = std::max(proj_err, distance(got, want));
    }
  }
  double oracle_err = 0.0;
  {
    Rng rng(203);
    for (int i = 0; i < 100; ++i) {
      const Point anchor = sample_in_ball(space, rng);
      const Point x = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const ConvexFunction f = ConvexFunction::neg_cos_distance(space, anchor);
      oracle_err = std::max(
          oracle_err, distance(resolvent({f, space, x, lam}).minimizer,
                               resolvent_on_geodesic(f, lam, x, anchor)
                                   .minimizer));
    }
  }
  double fixed_err = 0.0;
  for (const CatalogEntry& entry : make_catalog(space)) {
    const Point& u = *entry.f.known_minimizer();
    for (const double lam : {0.1, 1.0, 10.0}) {
      fixed_err = std::max(
          fixed_err, distance(resolvent({entry.f, space, u, lam}).minimizer, u));
    }
  }
  const bool pass =
      proj_err <= 1e-9 && oracle_err <= 1e-7 && fixed_err <= 1e-6;
  return {pass, "projection " + fmt(proj_err) + " (<= 1e-9, 100), oracle " +
                    fmt(oracle_err) + " (<= 1e-7, 100), fixed point " +
                    fmt(fixed_err) + " (<= 1e-6, 12)"};
}

// --- criterion 3: firm / value-gap / quasi-firm inequalities ----------------

Verdict criterion_resolvent_inequalities() {
  const AdmissibleSpace space = make_space();
  const std::vector<CatalogEntry> cat = make_catalog(space);
  auto log_lambda = [](Rng& rng) {
    return std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  };

  double firm_min = 1e300;
  {
    Rng rng(304);
    for (int i = 0; i < 100; ++i) {
      const CatalogEntry& entry = cat[i % cat.size()];
      const Point x = sample_in_ball(space, rng);
      const Point y = sample_in_ball(space, rng);
      const double lam = log_lambda(rng);
      const double mu = log_lambda(rng);
      firm_min = std::min(firm_min, check_firm_pair({entry.f, space, x, lam},
                                                    {entry.f, space, y, mu}));
    }
  }
  double sq_min = 1e300;
  double quasi_min = 1e300;
  {
    Rng rng(305);
    for (int i = 0; i < 200; ++i) {
      const CatalogEntry& entry = cat[i % cat.size()];
      const Point& u = *entry.f.known_minimizer();
      const Point x = sample_in_ball(space, rng);
      const double lam = log_lambda(rng);
      sq_min = std::min(sq_min, check_sq_firm({entry.f, space, x, lam}, u));
      quasi_min =
          std::min(quasi_min, check_quasi_firm({entry.f, space, x, lam}, u));
    }
  }
  const bool pass = firm_min >= -1e-8 && sq_min >= -1e-8 && quasi_min >= -1e-8;
  return {pass, "min residuals: firm " + fmt(firm_min) + " (100 pairs), "
                    "value-gap " + fmt(sq_min) + " (200), quasi-firm " +
                    fmt(quasi_min) + " (200); all >= -1e-8"};
}

// --- criteria 4 and 8 share the averaged reference run ----------------------

struct MannRun {
  AdmissibleSpace space;
  ConvexFunction f;
  Point z;
  IterationTrace trace;
};

MannRun make_mann_run() {
  AdmissibleSpace space = make_space();
  const Point z = exp_map(space.pole(), 0.1 * axis_tangent(space.pole()));
  const Point x1 = exp_map(z, 0.4 * axis_tangent(z));
  ConvexFunction f = ConvexFunction::neg_cos_distance(space, z);
  IterationTrace trace =
      run_mann(f, space, x1, Schedule::constant(ScheduleRole::alpha, 0.5),
               Schedule::constant(ScheduleRole::lambda, 1.0), 500, 0.0);
  return {std::move(space), std::move(f), z, std::move(trace)};
}

Verdict criterion_mann(const MannRun& run) {
  const auto& it = run.trace.iterates;
  double fejer_worst = 1e300;
  for (std::size_t i = 0; i + 1 < it.size(); ++i) {
    fejer_worst = std::min(
        fejer_worst, distance(it[i], run.z) - distance(it[i + 1], run.z));
  }
  const double final_dist = distance(it.back(), run.z);
  const double value_gap =
      run.f.evaluate(it.back()) - run.f.evaluate(run.z);
  const double final_step = run.trace.step_records.back().step_distance;
  const BoundednessCertificate cert = boundedness_certificate(
      run.trace,
      default_tail_start(run.trace.resolvent_points.size()), run.space);

  const bool pass = fejer_worst >= -1e-10 && final_dist <= 1e-4 &&
                    value_gap <= 1e-6 && final_step <= 1e-4 &&
                    cert.spherically_bounded_estimate;
  return {pass, "fejer slack " + fmt(fejer_worst) + " (>= -1e-10), d(x_N,z) " +
                    fmt(final_dist) + " (<= 1e-4, N=500), value gap " +
                    fmt(value_gap) + " (<= 1e-6), d(z_N,x_N) " +
                    fmt(final_step) + " (<= 1e-4), bounded=" +
                    (cert.spherically_bounded_estimate ? "true" : "false")};
}

// --- criteria 5 and 6: anchored runs in both schedule regimes ---------------

Verdict criterion_halpern(const Schedule& lambda_schedule,
                          const std::string& regime) {
  const AdmissibleSpace space = make_space();
  const Point z = exp_map(space.pole(), 0.1 * axis_tangent(space.pole()));
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, z);
  const Point v = exp_map(space.pole(), -0.35 * axis_tangent(space.pole()));
  const Point y1 = exp_map(z, 0.3 * axis_tangent(z));

  const IterationTrace trace =
      run_halpern(f, space, y1, v, Schedule::harmonic(ScheduleRole::alpha, 0.5),
                  lambda_schedule, 10000, 0.0);
  const Point& pv = *trace.reference_projection;

  const double bound =
      std::max(distance(pv, v), distance(pv, y1)) + 1e-10;
  double worst_excess = 0.0;
  for (const Point& y : trace.iterates) {
    worst_excess = std::max(worst_excess, distance(y, pv) - bound);
  }
  const double final_dist = distance(trace.iterates.back(), pv);

  // Average anchor-projection distance over the first and last 10% of steps.
  const std::size_t n = trace.iterates.size();
  const std::size_t decade = n / 10;
  double first_avg = 0.0;
  double last_avg = 0.0;
  for (std::size_t i = 0; i < decade; ++i) {
    first_avg += distance(trace.iterates[i], pv);
    last_avg += distance(trace.iterates[n - decade + i], pv);
  }
  first_avg /= static_cast<double>(decade);
  last_avg /= static_cast<double>(decade);

  bool pass = worst_excess <= 0.0 && final_dist <= 0.05;
  std::string detail = regime + ": bound excess " + fmt(worst_excess) +
                       " (<= 0 vs max{d(Pv,v),d(Pv,y1)}+1e-10), d(y_N,Pv) " +
                       fmt(final_dist) + " (<= 0.05, N=10^4)";
  if (regime == "growing lambda") {
    pass = pass && last_avg < first_avg;
    detail += ", decade averages " + fmt(first_avg) + " -> " + fmt(last_avg) +
              " (strictly decreasing)";
  }
  return {pass, detail};
}

// --- criterion 7: degenerate schedules collapse to the plain scheme ---------

Verdict criterion_degenerate() {
  const AdmissibleSpace space = make_space();
  const Point z = exp_map(space.pole(), 0.1 * axis_tangent(space.pole()));
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, z);
  const Point x1 = exp_map(z, 0.4 * axis_tangent(z));
  const Point v = exp_map(space.pole(), -0.3 * axis_tangent(space.pole()));
  const Schedule lam = Schedule::constant(ScheduleRole::lambda, 1.0);
  const Schedule zero = Schedule::constant(ScheduleRole::alpha, 0.0);

  const IterationTrace ppa = run_ppa(f, space, x1, lam, 60, 0.0);
  const IterationTrace mann0 = run_mann(f, space, x1, zero, lam, 60, 0.0);
  const IterationTrace halp0 = run_halpern(f, space, x1, v, zero, lam, 60, 0.0);

  double mann_dev = 0.0;
  double halp_dev = 0.0;
  for (std::size_t i = 0; i < ppa.iterates.size(); ++i) {
    mann_dev = std::max(mann_dev, distance(ppa.iterates[i], mann0.iterates[i]));
    halp_dev = std::max(halp_dev, distance(ppa.iterates[i], halp0.iterates[i]));
  }

  const IterationTrace halp1 = run_halpern(
      f, space, x1, v, Schedule::constant(ScheduleRole::alpha, 1.0), lam, 50,
      0.0);
  double anchor_dev = 0.0;
  for (std::size_t i = 1; i < halp1.iterates.size(); ++i) {
    anchor_dev = std::max(anchor_dev, distance(halp1.iterates[i], v));
  }

  const bool pass = mann_dev <= 1e-12 && halp_dev <= 1e-12 && anchor_dev <= 1e-12;
  return {pass, "alpha=0 averaged vs plain " + fmt(mann_dev) +
                    ", alpha=0 anchored vs plain " + fmt(halp_dev) +
                    ", alpha=1 anchored pinned to v " + fmt(anchor_dev) +
                    " (all <= 1e-12)"};
}

// --- criterion 8: diagnostics recover the limit from the averaged run -------

Verdict criterion_diagnostics(const MannRun& run) {
  const AsymptoticCenterEstimate ac = asymptotic_center(
      run.trace.iterates,
      default_tail_start(run.trace.iterates.size()), run.space);
  const double ac_err = distance(ac.center, run.z);

  const std::vector<double> betas = g_weights_from_trace(run.trace);
  const GFunctionEstimate est =
      g_maximizer(run.trace.resolvent_points, betas, run.space);
  const double g_err = distance(est.maximizer, run.z);

  const double sigma = est.sigma_n.back();
  const auto& zs = run.trace.resolvent_points;
  auto g_value = [&](const Point& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < zs.size(); ++k) {
      s += betas[k] * cos_distance(y, zs[k]);
    }
    return s / sigma;
  };

  Rng rng(808);
  double lip_worst = 0.0;
  double conc_worst = 1e300;
  for (int i = 0; i < 500; ++i) {
    const Point a = sample_in_ball(run.space, rng);
    const Point b = sample_in_ball(run.space, rng);
    const double w = rng.uniform();
    const double ga = g_value(a);
    const double gb = g_value(b);
    lip_worst = std::max(lip_worst, std::abs(ga - gb) - distance(a, b));
    conc_worst = std::min(
        conc_worst,
        g_value(interpolate(a, b, w)) - (w * ga + (1.0 - w) * gb));
  }

  const bool pass = ac_err <= 1e-2 && g_err <= 1e-2 && lip_worst <= 1e-10 &&
                    conc_worst >= -1e-10;
  return {pass, "asymptotic center off by " + fmt(ac_err) +
                    " (<= 1e-2), g maximizer off by " + fmt(g_err) +
                    " (<= 1e-2), Lipschitz excess " + fmt(lip_worst) +
                    " (<= 1e-10), concavity slack " + fmt(conc_worst) +
                    " (>= -1e-10, 500 pairs)"};
}

// --- criterion 9: curvature rescaling is a pointwise bijection --------------

Verdict criterion_curvature() {
  const AdmissibleSpace space = make_space();
  const Point z = exp_map(space.pole(), 0.1 * axis_tangent(space.pole()));
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, z);
  const Point x1 = exp_map(z, 0.4 * axis_tangent(z));
  const Schedule alpha = Schedule::constant(ScheduleRole::alpha, 0.5);
  const Schedule lam = Schedule::constant(ScheduleRole::lambda, 1.0);

  const IterationTrace flat = run_mann(f, space, x1, alpha, lam, 100, 0.0);
  const KappaSpace ks(4.0, space);
  const IterationTrace scaled = run_mann_kappa(f, ks, x1, alpha, lam, 100, 0.0);

  double point_dev = 0.0;
  for (std::size_t i = 0; i < flat.iterates.size(); ++i) {
    point_dev =
        std::max(point_dev, distance(flat.iterates[i], scaled.iterates[i]));
  }
  double scalar_dev = 0.0;
  for (std::size_t i = 0; i < flat.step_records.size(); ++i) {
    // kappa-space distances carry the 1/sqrt(kappa) unit.
    scalar_dev = std::max(
        scalar_dev, std::abs(scaled.step_records[i].step_distance -
                             0.5 * flat.step_records[i].step_distance));
  }
  const bool pass = point_dev <= 1e-9 && scalar_dev <= 1e-9;
  return {pass, "kappa=4 vs kappa=1: iterate deviation " + fmt(point_dev) +
                    ", step-length map deviation " + fmt(scalar_dev) +
                    " (both <= 1e-9, 100 steps)"};
}

// --- criterion 10: byte-identical outputs under a fixed seed ----------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sphereprox_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["space"] = {{"pole", {0.0, 0.0, 1.0}}};
  doc["function"] = {{"kind", "weighted_neg_cos"},
                     {"anchors", {{0.2, 0.1, 1.0}, {-0.2, 0.15, 1.0}}},
                     {"weights", {1.0, 2.5}}};
  doc["algorithm"] = "halpern";
  doc["schedules"] = {{"alpha", {{"family", "harmonic"}, {"exponent", 0.5}}},
                      {"lambda", {{"family", "linear"}}}};
  doc["init"] = {0.1, -0.2, 1.0};
  doc["anchor"] = {-0.15, 0.1, 1.0};
  doc["n_max"] = 150;
  doc["stop_tol"] = 0.0;
  doc["seed"] = 11;

  auto run_into = [&](const std::string& tag) {
    auto d = doc;
    d["outputs"] = {
        {"trace_csv_path", (dir / (tag + ".csv")).string()},
        {"report_json_path", (dir / (tag + ".json")).string()}};
    const ExperimentOutcome out = run_experiment(parse_experiment_config(d));
    return std::pair<std::string, std::string>(
        slurp(dir / (tag + ".csv")), slurp(dir / (tag + ".json")));
  };

  const auto first = run_into("a");
  const auto second = run_into("b");
  const bool csv_same = !first.first.empty() && first.first == second.first;
  const bool json_same = !first.second.empty() && first.second == second.second;
  fs::remove_all(dir);
  return {csv_same && json_same,
          std::string("repeated run: csv ") + (csv_same ? "identical" : "differs") +
              " (" + std::to_string(first.first.size()) + " bytes), report " +
              (json_same ? "identical" : "differs") + " (" +
              std::to_string(first.second.size()) + " bytes)"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria;

  criteria.emplace_back("comparison inequalities", criterion_geometry);
  criteria.emplace_back("resolvent correctness", criterion_resolvent_correctness);
  criteria.emplace_back("resolvent inequalities",
                        criterion_resolvent_inequalities);

  // Runs 4 and 8 share one 500-step averaged trace.
  MannRun mann_run = make_mann_run();
  criteria.emplace_back("averaged run convergence",
                        [&] { return criterion_mann(mann_run); });
  criteria.emplace_back("anchored run, growing lambda", [] {
    return criterion_halpern(Schedule::linear(ScheduleRole::lambda),
                             "growing lambda");
  });
  criteria.emplace_back("anchored run, constant lambda", [] {
    return criterion_halpern(Schedule::constant(ScheduleRole::lambda, 1.0),
                             "constant lambda");
  });
  criteria.emplace_back("degenerate schedule equivalences",
                        criterion_degenerate);
  criteria.emplace_back("diagnostics recover the limit",
                        [&] { return criterion_diagnostics(mann_run); });
  criteria.emplace_back("curvature rescaling bijection", criterion_curvature);
  criteria.emplace_back("deterministic outputs", criterion_determinism);

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && v.pass;
    std::printf("AC%-2zu %-34s %s  %s\n", i + 1, criteria[i].first.c_str(),
                v.pass ? "pass" : "FAIL", v.detail.c_str());
  }
  std::printf("%s\n", all_pass ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL");
  return all_pass ? 0 : 1;
}
