#include "core/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

#include "core/catk.hpp"
#include "core/diagnostics.hpp"
#include "core/errors.hpp"
#include "core/resolvent.hpp"
#include "core/rng.hpp"

namespace sphereprox {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  std::string s = "[";
  for (int i = 0; i < p.dim(); ++i) {
    if (i) s += ", ";
    s += fmt17(p.coords()[i]);
  }
  return s + "]";
}

const nlohmann::json& need(const nlohmann::json& j, const char* key,
                           const char* ctx) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(ctx) + " needs \"" + key + "\"");
  }
  return j.at(key);
}

double need_number(const nlohmann::json& j, const char* key, const char* ctx) {
  const nlohmann::json& v = need(j, key, ctx);
  if (!v.is_number()) {
    throw ConfigError(std::string(ctx) + " field \"" + key +
                      "\" must be a number");
  }
  return v.get<double>();
}

Point point_from_json(const nlohmann::json& a, const char* ctx) {
  if (!a.is_array() || a.size() < 2) {
    throw ConfigError(std::string(ctx) +
                      " must be a coordinate array of length >= 2");
  }
  Vec v(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) {
      throw ConfigError(std::string(ctx) + " coordinates must be numbers");
    }
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  try {
    return Point::from_unnormalized(std::move(v));
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string(ctx) + ": " + e.what());
  }
}

nlohmann::json coords_json(const Point& p) {
  return std::vector<double>(p.coords().data(),
                             p.coords().data() + p.coords().size());
}

}  // namespace

Schedule schedule_from_json(ScheduleRole role, const nlohmann::json& j) {
  const char* ctx = role == ScheduleRole::alpha ? "schedules.alpha"
                                                : "schedules.lambda";
  const nlohmann::json& fam = need(j, "family", ctx);
  if (!fam.is_string()) {
    throw ConfigError(std::string(ctx) + " \"family\" must be a string");
  }
  const std::string family = fam.get<std::string>();
  try {
    if (family == "constant") {
      return Schedule::constant(role, need_number(j, "value", ctx));
    }
    if (family == "harmonic") {
      return Schedule::harmonic(role, need_number(j, "exponent", ctx));
    }
    if (family == "linear") {
      return Schedule::linear(role);
    }
    if (family == "custom") {
      const nlohmann::json& vals = need(j, "values", ctx);
      if (!vals.is_array()) {
        throw ConfigError(std::string(ctx) + " \"values\" must be an array");
      }
      std::vector<double> values;
      for (const auto& v : vals) {
        if (!v.is_number()) {
          throw ConfigError(std::string(ctx) + " values must be numbers");
        }
        values.push_back(v.get<double>());
      }
      ScheduleClaims claims;
      if (j.contains("claims")) {
        const nlohmann::json& c = j.at("claims");
        if (!c.is_object()) {
          throw ConfigError(std::string(ctx) + " \"claims\" must be an object");
        }
        const auto read = [&](const char* key, std::optional<bool>& slot) {
          if (!c.contains(key)) return;
          if (!c.at(key).is_boolean()) {
            throw ConfigError(std::string(ctx) + " claim \"" + key +
                              "\" must be a boolean");
          }
          slot = c.at(key).get<bool>();
        };
        read("limit_zero", claims.limit_zero);
        read("limit_infinity", claims.limit_infinity);
        read("sum_diverges", claims.sum_diverges);
        read("sum_squares_diverges", claims.sum_squares_diverges);
        read("supremum_below_one", claims.supremum_below_one);
        read("infimum_positive", claims.infimum_positive);
      }
      return Schedule::custom(role, std::move(values), claims);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string(ctx) + ": " + e.what());
  }
  throw ConfigError(std::string(ctx) + ": unknown family \"" + family + "\"");
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["family"] = to_string(s.family());
  switch (s.family()) {
    case ScheduleFamily::constant:
      j["value"] = s.constant_value();
      break;
    case ScheduleFamily::harmonic:
      j["exponent"] = s.harmonic_exponent();
      break;
    case ScheduleFamily::linear:
      break;
    case ScheduleFamily::custom: {
      j["values"] = s.custom_values();
      nlohmann::json claims = nlohmann::json::object();
      const ScheduleClaims& c = s.claims();
      if (c.limit_zero) claims["limit_zero"] = *c.limit_zero;
      if (c.limit_infinity) claims["limit_infinity"] = *c.limit_infinity;
      if (c.sum_diverges) claims["sum_diverges"] = *c.sum_diverges;
      if (c.sum_squares_diverges)
        claims["sum_squares_diverges"] = *c.sum_squares_diverges;
      if (c.supremum_below_one)
        claims["supremum_below_one"] = *c.supremum_below_one;
      if (c.infimum_positive) claims["infimum_positive"] = *c.infimum_positive;
      if (!claims.empty()) j["claims"] = claims;
      break;
    }
  }
  return j;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  const nlohmann::json& ver = need(doc, "schema_version", "config");
  if (!ver.is_number_integer() ||
      ver.get<int>() != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version (this build reads " +
                      std::to_string(kConfigSchemaVersion) + ")");
  }

  const nlohmann::json& sp = need(doc, "space", "config");
  const Point pole = point_from_json(need(sp, "pole", "space"), "space.pole");
  double radius = kDefaultBallRadius;
  if (sp.contains("radius")) radius = need_number(sp, "radius", "space");
  if (sp.contains("ambient_dim")) {
    const nlohmann::json& ad = sp.at("ambient_dim");
    if (!ad.is_number_integer() || ad.get<int>() != pole.dim()) {
      throw ConfigError("space.ambient_dim disagrees with the pole length");
    }
  }
  double kappa = 1.0;
  if (sp.contains("kappa")) kappa = need_number(sp, "kappa", "space");
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw ConfigError("space.kappa must be positive and finite");
  }

  std::optional<AdmissibleSpace> space;
  try {
    space.emplace(pole, radius);
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("space: ") + e.what());
  }

  ConvexFunction function =
      ConvexFunction::from_json(*space, need(doc, "function", "config"));

  const nlohmann::json& alg = need(doc, "algorithm", "config");
  if (!alg.is_string()) throw ConfigError("algorithm must be a string");
  const std::string alg_name = alg.get<std::string>();
  SchemeKind algorithm;
  if (alg_name == "ppa") {
    algorithm = SchemeKind::ppa;
  } else if (alg_name == "mann") {
    algorithm = SchemeKind::mann;
  } else if (alg_name == "halpern") {
    algorithm = SchemeKind::halpern;
  } else {
    throw ConfigError("unknown algorithm \"" + alg_name +
                      "\" (expected ppa, mann, or halpern)");
  }

  const nlohmann::json& sched = need(doc, "schedules", "config");
  std::optional<Schedule> alpha;
  if (algorithm == SchemeKind::ppa) {
    if (sched.contains("alpha")) {
      throw ConfigError("ppa takes no alpha schedule");
    }
  } else {
    alpha = schedule_from_json(ScheduleRole::alpha,
                               need(sched, "alpha", "schedules"));
  }
  Schedule lambda = schedule_from_json(ScheduleRole::lambda,
                                       need(sched, "lambda", "schedules"));

  const Point init = point_from_json(need(doc, "init", "config"), "init");
  if (!space->contains(init)) {
    throw ConfigError("init point lies outside the configured space");
  }

  std::optional<Point> anchor;
  if (algorithm == SchemeKind::halpern) {
    anchor = point_from_json(need(doc, "anchor", "config"), "anchor");
    if (!space->contains(*anchor)) {
      throw ConfigError("anchor point lies outside the configured space");
    }
  } else if (doc.contains("anchor")) {
    throw ConfigError("anchor is only meaningful for halpern");
  }

  int n_max = kDefaultIterationCap;
  if (doc.contains("n_max")) {
    const nlohmann::json& nm = doc.at("n_max");
    if (!nm.is_number_integer() || nm.get<int>() < 1) {
      throw ConfigError("n_max must be a positive integer");
    }
    n_max = nm.get<int>();
  }

  double stop_tol = kDefaultStopTolerance;
  if (doc.contains("stop_tol")) {
    stop_tol = need_number(doc, "stop_tol", "config");
    if (!std::isfinite(stop_tol) || stop_tol < 0.0) {
      throw ConfigError("stop_tol must be finite and nonnegative");
    }
  }

  std::uint64_t seed = 1;
  if (doc.contains("seed")) {
    const nlohmann::json& sd = doc.at("seed");
    if (!sd.is_number_integer() ||
        (!sd.is_number_unsigned() && sd.get<long long>() < 0)) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    seed = sd.get<std::uint64_t>();
  }

  const nlohmann::json& outs = need(doc, "outputs", "config");
  const nlohmann::json& csv = need(outs, "trace_csv_path", "outputs");
  const nlohmann::json& rep = need(outs, "report_json_path", "outputs");
  if (!csv.is_string() || csv.get<std::string>().empty() ||
      !rep.is_string() || rep.get<std::string>().empty()) {
    throw ConfigError("outputs paths must be nonempty strings");
  }

  return ExperimentConfig{kConfigSchemaVersion,
                          kappa,
                          std::move(*space),
                          std::move(function),
                          algorithm,
                          std::move(alpha),
                          std::move(lambda),
                          init,
                          std::move(anchor),
                          n_max,
                          stop_tol,
                          seed,
                          csv.get<std::string>(),
                          rep.get<std::string>()};
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file " + path);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg = parse_experiment_config(doc);

  // Relative output paths land next to the config file.
  const std::filesystem::path dir =
      std::filesystem::path(path).parent_path();
  const auto resolve = [&](std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_relative()) p = (dir / fp).lexically_normal().string();
  };
  resolve(cfg.trace_csv_path);
  resolve(cfg.report_json_path);
  return cfg;
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path fp(path);
  std::error_code ec;
  if (fp.has_parent_path()) {
    std::filesystem::create_directories(fp.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + fp.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(fp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing output file " + path);
}

std::string render_csv(const IterationTrace& t) {
  std::string s = "n,alpha_n,lambda_n,step_dist,f_x,f_z,dist_to_min,dist_to_Pv\n";
  char buf[320];
  for (const StepRecord& r : t.step_records) {
    std::snprintf(buf, sizeof buf,
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n,
                  r.alpha, r.lambda, r.step_distance, r.value_at_iterate,
                  r.value_at_resolvent, r.dist_to_minimizer,
                  r.dist_to_projection);
    s += buf;
  }
  return s;
}

IterationTrace run_configured(const ExperimentConfig& cfg) {
  if (cfg.kappa == 1.0) {
    switch (cfg.algorithm) {
      case SchemeKind::ppa:
        return run_ppa(cfg.function, cfg.space, cfg.init, cfg.lambda,
                       cfg.n_max, cfg.stop_tol);
      case SchemeKind::mann:
        return run_mann(cfg.function, cfg.space, cfg.init, *cfg.alpha,
                        cfg.lambda, cfg.n_max, cfg.stop_tol);
      case SchemeKind::halpern:
        return run_halpern(cfg.function, cfg.space, cfg.init, *cfg.anchor,
                           *cfg.alpha, cfg.lambda, cfg.n_max, cfg.stop_tol);
    }
  }
  const KappaSpace ks(cfg.kappa, cfg.space);
  switch (cfg.algorithm) {
    case SchemeKind::ppa:
      return run_ppa_kappa(cfg.function, ks, cfg.init, cfg.lambda, cfg.n_max,
                           cfg.stop_tol);
    case SchemeKind::mann:
      return run_mann_kappa(cfg.function, ks, cfg.init, *cfg.alpha,
                            cfg.lambda, cfg.n_max, cfg.stop_tol);
    case SchemeKind::halpern:
      return run_halpern_kappa(cfg.function, ks, cfg.init, *cfg.anchor,
                               *cfg.alpha, cfg.lambda, cfg.n_max,
                               cfg.stop_tol);
  }
  throw ConfigError("unreachable algorithm kind");
}

double min_or_nan(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(v.begin(), v.end());
}

// Assembles the run report. `t` carries curvature-scaled distances for the
// user; `model` the unit-curvature ones the diagnostics consume. The two
// share their point sequences.
nlohmann::json build_report(const ExperimentConfig& cfg,
                            const IterationTrace& t,
                            const IterationTrace& model) {
  const double scale = 1.0 / std::sqrt(cfg.kappa);
  nlohmann::json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["scheme"] = to_string(t.scheme);
  j["kappa"] = cfg.kappa;
  j["seed"] = cfg.seed;
  j["steps"] = t.step_records.size();
  j["termination"] = to_string(t.terminated_reason);
  j["failure_message"] = t.failure_message.empty()
                             ? nlohmann::json()
                             : nlohmann::json(t.failure_message);

  nlohmann::json checks = nlohmann::json::array();
  for (const HypothesisCheck& c : t.hypothesis_checks) {
    checks.push_back({{"condition", c.condition},
                      {"satisfied", c.satisfied},
                      {"method", c.method}});
  }
  j["hypothesis_checks"] = checks;

  {
    nlohmann::json fin;
    const Point& last = t.iterates.back();
    fin["value"] = cfg.function.evaluate(last);
    fin["step_distance"] =
        t.step_records.empty()
            ? nlohmann::json()
            : nlohmann::json(t.step_records.back().step_distance);
    fin["dist_to_minimizer"] =
        t.reference_minimizer
            ? nlohmann::json(distance(last, *t.reference_minimizer) * scale)
            : nlohmann::json();
    fin["dist_to_projection"] =
        t.reference_projection
            ? nlohmann::json(distance(last, *t.reference_projection) * scale)
            : nlohmann::json();
    j["final"] = fin;
  }

  j["boundedness"] = nullptr;
  j["asymptotic_center"] = nullptr;
  j["g_maximizer"] = nullptr;
  j["inequalities"] = nullptr;

  const std::size_t steps = model.resolvent_points.size();
  try {
    if (steps >= 20) {
      const int tail = default_tail_start(static_cast<int>(steps));
      const BoundednessCertificate cert =
          boundedness_certificate(model, tail, cfg.space);
      j["boundedness"] = {
          {"spherically_bounded", cert.spherically_bounded_estimate},
          {"tail_inf_sup", cert.tail_inf_sup * scale},
          {"sup_step_distance", cert.sup_step_distance * scale},
          {"tail_start", cert.tail_start}};

      const AsymptoticCenterEstimate ac = asymptotic_center(
          model.iterates, default_tail_start(static_cast<int>(
                              model.iterates.size())), cfg.space);
      j["asymptotic_center"] = {{"center", coords_json(ac.center)},
                                {"radius", ac.radius_estimate * scale},
                                {"tail_start", ac.tail_start},
                                {"grid_resolution", ac.grid_resolution}};
    }
    if (steps >= 10) {
      const std::vector<double> betas = g_weights_from_trace(model);
      const GFunctionEstimate est =
          g_maximizer(model.resolvent_points, betas, cfg.space);
      j["g_maximizer"] = {{"maximizer", coords_json(est.maximizer)},
                          {"max_value", est.max_value},
                          {"sigma_final", est.sigma_n.back()}};
    }
  } catch (const Error& e) {
    j["diagnostics_error"] = e.what();
  }

  if (!model.step_records.empty()) {
    try {
      std::optional<Point> u = t.reference_projection;
      if (!u) u = t.reference_minimizer;
      if (!u) {
        u = metric_project_to_argmin(cfg.function, cfg.space,
                                     model.iterates.back());
      }
      const TraceInequalityReport rep =
          check_trace_inequalities(model, cfg.function, *u);
      j["inequalities"] = {
          {"reference_point", coords_json(*u)},
          {"quasi_firm_min", min_or_nan(rep.quasi_firm)},
          {"cosine_update_min", min_or_nan(rep.cosine_update)},
          {"fejer_min", min_or_nan(rep.fejer)},
          {"proximal_chain_min", min_or_nan(rep.proximal_chain)},
          {"min_residual", rep.min_residual},
          {"pass", rep.pass}};
    } catch (const Error& e) {
      j["inequalities_error"] = e.what();
    }
  }
  return j;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  IterationTrace t = run_configured(cfg);

  // Unit-curvature view for the diagnostics; points are shared, only the
  // recorded distance scalars differ by the metric factor.
  IterationTrace model = t;
  if (cfg.kappa != 1.0) {
    const double root = std::sqrt(cfg.kappa);
    for (StepRecord& r : model.step_records) {
      r.step_distance *= root;
      r.dist_to_minimizer *= root;
      r.dist_to_projection *= root;
    }
  }

  write_text_file(cfg.trace_csv_path, render_csv(t));
  nlohmann::json report = build_report(cfg, t, model);
  write_text_file(cfg.report_json_path, report.dump(2) + "\n");

  ExperimentOutcome out{0, "", std::move(t), std::move(report)};
  if (out.trace.terminated_reason == TerminationReason::resolvent_failure) {
    out.exit_code = 1;
    out.message = out.trace.failure_message;
  }
  return out;
}

// --- invariant check suites -------------------------------------------------

namespace {

// Collects one property's samples: residual-style properties must stay
// above -tolerance, error-style ones below +tolerance.
class PropertyRun {
 public:
  PropertyRun(std::string name, double tolerance, bool residual_style,
              std::optional<double> override_tol)
      : name_(std::move(name)),
        tolerance_(override_tol.value_or(tolerance)),
        residual_style_(residual_style) {}

  void observe(double value, const std::function<std::string()>& describe) {
    if (std::isnan(value)) return;  // vacuous sample
    ++count_;
    if (count_ == 1) {
      worst_ = value;
    } else {
      worst_ = residual_style_ ? std::min(worst_, value)
                               : std::max(worst_, value);
    }
    const bool violated =
        residual_style_ ? value < -tolerance_ : value > tolerance_;
    if (violated && witness_.empty()) witness_ = describe();
  }

  PropertyResult finish() const {
    PropertyResult r;
    r.name = name_;
    r.samples = count_;
    r.worst = worst_;
    r.tolerance = tolerance_;
    r.rule = residual_style_ ? "min >= -tolerance" : "max <= tolerance";
    r.pass = witness_.empty();
    r.witness = witness_;
    return r;
  }

 private:
  std::string name_;
  double tolerance_;
  bool residual_style_;
  int count_ = 0;
  double worst_ = 0.0;
  std::string witness_;
};

struct CatalogEntry {
  std::string name;
  ConvexFunction f;
};

std::vector<CatalogEntry> function_catalog(const AdmissibleSpace& space) {
  const auto pt = [](double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return Point::from_unnormalized(std::move(v));
  };
  const Point a = pt(0.2, 0.1, 1);
  const Point b = pt(-0.2, 0.15, 1);
  const Point c0 = pt(0.05, 0, 1);
  std::vector<CatalogEntry> cat;
  cat.push_back({"neg_cos", ConvexFunction::neg_cos_distance(space, a)});
  cat.push_back({"weighted_neg_cos",
                 ConvexFunction::weighted_neg_cos(space, {a, b}, {1.0, 2.5})});
  cat.push_back({"max_neg_cos", ConvexFunction::max_neg_cos(space, {a, b})});
  cat.push_back(
      {"ball_plus_neg_cos",
       ConvexFunction::sum(space,
                           {ConvexFunction::indicator_ball(space, c0, 0.2),
                            ConvexFunction::neg_cos_distance(space, b)})});
  return cat;
}

int scaled(int samples, int divisor) {
  return std::max(1, samples / divisor);
}

SuiteResult geometry_suite(std::uint64_t seed, int samples,
                           std::optional<double> tol) {
  const AdmissibleSpace space = AdmissibleSpace::with_default_radius(
      Point::from_unnormalized((Vec(3) << 0, 0, 1).finished()));
  PropertyRun cosine("cosine combination inequality", 1e-10, true, tol);
  PropertyRun sine("sine comparison inequality", 1e-10, true, tol);
  PropertyRun half("half-angle comparison inequality", 1e-10, true, tol);

  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Point x1 = sample_in_ball(space, rng);
    const Point x2 = sample_in_ball(space, rng);
    const Point x3 = sample_in_ball(space, rng);
    const double alpha = rng.uniform();
    const auto describe = [&] {
      return "sample " + std::to_string(i) + ": x1=" + fmt_point(x1) +
             " x2=" + fmt_point(x2) + " x3=" + fmt_point(x3) +
             " alpha=" + fmt17(alpha);
    };
    cosine.observe(cos_combination_residual(x1, x2, x3, alpha), describe);
    sine.observe(sine_comparison_residual(x1, x2, x3, alpha), describe);
    half.observe(half_angle_comparison_residual(x1, x2, x3, alpha), describe);
  }

  SuiteResult s;
  s.suite = "geometry";
  s.properties = {cosine.finish(), sine.finish(), half.finish()};
  s.pass = std::all_of(s.properties.begin(), s.properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
  return s;
}

SuiteResult functions_suite(std::uint64_t seed, int samples,
                            std::optional<double> tol) {
  const AdmissibleSpace space = AdmissibleSpace::with_default_radius(
      Point::from_unnormalized((Vec(3) << 0, 0, 1).finished()));
  const std::vector<CatalogEntry> cat = function_catalog(space);
  PropertyRun convexity("geodesic convexity", 1e-10, true, tol);
  PropertyRun optimality("certified minimizer optimality", 1e-10, true, tol);

  Rng rng(seed + 1);
  for (int i = 0; i < samples; ++i) {
    const CatalogEntry& entry = cat[i % cat.size()];
    const Point y1 = sample_in_ball(space, rng);
    const Point y2 = sample_in_ball(space, rng);
    const double w = rng.uniform();
    const double f1 = entry.f.evaluate(y1);
    const double f2 = entry.f.evaluate(y2);
    const double rhs = w * f1 + (1.0 - w) * f2;
    const auto describe = [&] {
      return entry.name + " sample " + std::to_string(i) + ": y1=" +
             fmt_point(y1) + " y2=" + fmt_point(y2) + " w=" + fmt17(w);
    };
    if (std::isfinite(rhs)) {
      convexity.observe(rhs - entry.f.evaluate(interpolate(y1, y2, w)),
                        describe);
    }
    if (entry.f.known_minimizer()) {
      optimality.observe(
          f1 - entry.f.evaluate(*entry.f.known_minimizer()), describe);
    }
  }

  SuiteResult s;
  s.suite = "functions";
  s.properties = {convexity.finish(), optimality.finish()};
  s.pass = std::all_of(s.properties.begin(), s.properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
  return s;
}

SuiteResult resolvent_suite(std::uint64_t seed, int samples,
                            std::optional<double> tol) {
  const AdmissibleSpace space = AdmissibleSpace::with_default_radius(
      Point::from_unnormalized((Vec(3) << 0, 0, 1).finished()));
  const std::vector<CatalogEntry> cat = function_catalog(space);

  PropertyRun projection("ball indicator resolvent equals closed-form projection",
                         1e-9, false, tol);
  PropertyRun oracle("general solver agrees with the geodesic oracle", 1e-7,
                     false, tol);
  PropertyRun fixed("resolvent fixes certified minimizers", 1e-6, false, tol);
  PropertyRun firm("two-point firmness", 1e-8, true, tol);
  PropertyRun sq("value-gap firmness", 1e-8, true, tol);
  PropertyRun quasi("quasi-firmness", 1e-8, true, tol);

  {
    Rng rng(seed + 2);
    const AdmissibleSpace inner(space.pole(), space.radius() * 0.5);
    const int n = scaled(samples, 10);
    for (int i = 0; i < n; ++i) {
      const Point center = sample_in_ball(inner, rng);
      const double r = rng.uniform(0.05, 0.25);
      const Point x = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const ConvexFunction f = ConvexFunction::indicator_ball(space, center, r);
      const Point got = resolvent({f, space, x, lam}).minimizer;
      const Point want =
          distance(center, x) <= r ? x : point_toward(center, x, r);
      projection.observe(distance(got, want), [&] {
        return "sample " + std::to_string(i) + ": center=" +
               fmt_point(center) + " r=" + fmt17(r) + " x=" + fmt_point(x) +
               " lambda=" + fmt17(lam);
      });
    }
  }

  {
    Rng rng(seed + 3);
    const int n = scaled(samples, 10);
    for (int i = 0; i < n; ++i) {
      const Point anchor = sample_in_ball(space, rng);
      const Point x = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const ConvexFunction f = ConvexFunction::neg_cos_distance(space, anchor);
      const Point got = resolvent({f, space, x, lam}).minimizer;
      const Point ref = resolvent_on_geodesic(f, lam, x, anchor).minimizer;
      oracle.observe(distance(got, ref), [&] {
        return "sample " + std::to_string(i) + ": anchor=" +
               fmt_point(anchor) + " x=" + fmt_point(x) +
               " lambda=" + fmt17(lam);
      });
    }
  }

  for (const CatalogEntry& entry : cat) {
    if (!entry.f.known_minimizer()) continue;
    const Point& u = *entry.f.known_minimizer();
    for (const double lam : {0.1, 1.0, 10.0}) {
      const Point ru = resolvent({entry.f, space, u, lam}).minimizer;
      fixed.observe(distance(ru, u), [&] {
        return entry.name + " at lambda=" + fmt17(lam);
      });
    }
  }

  {
    Rng rng(seed + 4);
    const int n = scaled(samples, 10);
    for (int i = 0; i < n; ++i) {
      const CatalogEntry& entry = cat[i % cat.size()];
      const Point x = sample_in_ball(space, rng);
      const Point y = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const double mu = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      firm.observe(check_firm_pair({entry.f, space, x, lam},
                                   {entry.f, space, y, mu}),
                   [&] {
                     return entry.name + " sample " + std::to_string(i) +
                            ": x=" + fmt_point(x) + " y=" + fmt_point(y) +
                            " lambda=" + fmt17(lam) + " mu=" + fmt17(mu);
                   });
    }
  }

  {
    Rng rng(seed + 5);
    const int n = scaled(samples, 5);
    for (int i = 0; i < n; ++i) {
      const CatalogEntry& entry = cat[i % cat.size()];
      if (!entry.f.known_minimizer()) continue;
      const Point& u = *entry.f.known_minimizer();
      const Point x = sample_in_ball(space, rng);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      const auto describe = [&] {
        return entry.name + " sample " + std::to_string(i) + ": x=" +
               fmt_point(x) + " lambda=" + fmt17(lam);
      };
      sq.observe(check_sq_firm({entry.f, space, x, lam}, u), describe);
      quasi.observe(check_quasi_firm({entry.f, space, x, lam}, u), describe);
    }
  }

  SuiteResult s;
  s.suite = "resolvent";
  s.properties = {projection.finish(), oracle.finish(), fixed.finish(),
                  firm.finish(),       sq.finish(),     quasi.finish()};
  s.pass = std::all_of(s.properties.begin(), s.properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
  return s;
}

SuiteResult diagnostics_suite(std::uint64_t seed, int samples,
                              std::optional<double> tol) {
  const AdmissibleSpace space = AdmissibleSpace::with_default_radius(
      Point::from_unnormalized((Vec(3) << 0, 0, 1).finished()));
  const Point a =
      Point::from_unnormalized((Vec(3) << 0.2, 0.1, 1).finished());
  const Point x1 =
      Point::from_unnormalized((Vec(3) << 0.1, -0.2, 1).finished());
  const ConvexFunction f = ConvexFunction::neg_cos_distance(space, a);

  // One reference orbit feeds the sampled properties.
  const IterationTrace trace = run_mann(
      f, space, x1, Schedule::constant(ScheduleRole::alpha, 0.5),
      Schedule::constant(ScheduleRole::lambda, 1.0), 500, 0.0);
  const std::vector<double> betas = g_weights_from_trace(trace);
  const std::vector<Point>& zs = trace.resolvent_points;
  double total = 0.0;
  for (double b : betas) total += b;
  const auto g = [&](const Point& y) {
    double acc = 0.0;
    for (std::size_t k = 0; k < zs.size(); ++k) {
      acc += betas[k] * cos_distance(y, zs[k]);
    }
    return acc / total;
  };

  PropertyRun lipschitz("averaged cosine is 1-lipschitz", 1e-10, false, tol);
  PropertyRun concavity("averaged cosine is geodesically concave", 1e-10,
                        true, tol);
  PropertyRun center("asymptotic center finds the orbit limit", 1e-2, false,
                     tol);
  PropertyRun gmax("averaged cosine maximizer finds the orbit limit", 1e-2,
                   false, tol);
  PropertyRun residuals("trace inequalities on live runs", 1e-8, true, tol);

  {
    Rng rng(seed + 6);
    const int n = scaled(samples, 2);
    for (int i = 0; i < n; ++i) {
      const Point y1 = sample_in_ball(space, rng);
      const Point y2 = sample_in_ball(space, rng);
      const auto describe = [&] {
        return "sample " + std::to_string(i) + ": y1=" + fmt_point(y1) +
               " y2=" + fmt_point(y2);
      };
      lipschitz.observe(std::abs(g(y1) - g(y2)) - distance(y1, y2), describe);
      if (i % 3 == 0) {
        const double w = rng.uniform();
        concavity.observe(
            g(interpolate(y1, y2, w)) - (w * g(y1) + (1.0 - w) * g(y2)),
            describe);
      }
    }
  }

  {
    const AsymptoticCenterEstimate est = asymptotic_center(
        trace.iterates,
        default_tail_start(static_cast<int>(trace.iterates.size())), space);
    center.observe(distance(est.center, a),
                   [&] { return "center=" + fmt_point(est.center); });
    const GFunctionEstimate gm = g_maximizer(zs, betas, space);
    gmax.observe(distance(gm.maximizer, a),
                 [&] { return "maximizer=" + fmt_point(gm.maximizer); });
  }

  {
    const TraceInequalityReport rep = check_trace_inequalities(trace, f, a);
    residuals.observe(rep.min_residual, [&] { return "mann reference run"; });

    const IterationTrace ppa = run_ppa(
        f, space, x1, Schedule::constant(ScheduleRole::lambda, 1.0), 60);
    residuals.observe(check_trace_inequalities(ppa, f, a).min_residual,
                      [&] { return "ppa run"; });

    const Point v =
        Point::from_unnormalized((Vec(3) << -0.15, 0.1, 1).finished());
    const IterationTrace hal = run_halpern(
        f, space, x1, v, Schedule::harmonic(ScheduleRole::alpha, 0.5),
        Schedule::linear(ScheduleRole::lambda), 120, 0.0);
    residuals.observe(
        check_trace_inequalities(hal, f, *hal.reference_projection)
            .min_residual,
        [&] { return "halpern run"; });
  }

  SuiteResult s;
  s.suite = "diagnostics";
  s.properties = {lipschitz.finish(), concavity.finish(), center.finish(),
                  gmax.finish(), residuals.finish()};
  s.pass = std::all_of(s.properties.begin(), s.properties.end(),
                       [](const PropertyResult& p) { return p.pass; });
  return s;
}

}  // namespace

CheckReport check_invariants(const std::string& suite, std::uint64_t seed,
                             int samples,
                             std::optional<double> tolerance_override) {
  if (samples < 1) throw ConfigError("samples must be positive");
  if (tolerance_override &&
      (!std::isfinite(*tolerance_override) || *tolerance_override < 0.0)) {
    throw ConfigError("tolerance override must be finite and nonnegative");
  }

  CheckReport report;
  report.suite_selector = suite;
  report.seed = seed;
  report.samples = samples;
  report.tolerance_override = tolerance_override;

  const bool all = suite == "all";
  if (all || suite == "geometry") {
    report.suites.push_back(geometry_suite(seed, samples, tolerance_override));
  }
  if (all || suite == "functions") {
    report.suites.push_back(
        functions_suite(seed, samples, tolerance_override));
  }
  if (all || suite == "resolvent") {
    report.suites.push_back(
        resolvent_suite(seed, samples, tolerance_override));
  }
  if (all || suite == "diagnostics") {
    report.suites.push_back(
        diagnostics_suite(seed, samples, tolerance_override));
  }
  if (report.suites.empty()) {
    throw ConfigError("unknown suite \"" + suite +
                      "\" (expected geometry, functions, resolvent, "
                      "diagnostics, or all)");
  }
  report.pass = std::all_of(report.suites.begin(), report.suites.end(),
                            [](const SuiteResult& s) { return s.pass; });
  return report;
}

nlohmann::json check_report_to_json(const CheckReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite_selector;
  j["seed"] = report.seed;
  j["samples"] = report.samples;
  j["tolerance_override"] = report.tolerance_override
                                ? nlohmann::json(*report.tolerance_override)
                                : nlohmann::json();
  nlohmann::json suites = nlohmann::json::array();
  for (const SuiteResult& s : report.suites) {
    nlohmann::json props = nlohmann::json::array();
    for (const PropertyResult& p : s.properties) {
      props.push_back({{"name", p.name},
                       {"samples", p.samples},
                       {"worst", p.worst},
                       {"tolerance", p.tolerance},
                       {"rule", p.rule},
                       {"pass", p.pass},
                       {"witness", p.witness}});
    }
    suites.push_back({{"suite", s.suite},
                      {"properties", props},
                      {"pass", s.pass}});
  }
  j["suites"] = suites;
  j["pass"] = report.pass;
  return j;
}

}  // namespace sphereprox
