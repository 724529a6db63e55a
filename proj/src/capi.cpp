// C ABI shim: translates the exception-based C++ core into status codes,
// thread-local error text, and opaque run handles.

#include "sphereprox.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/experiment.hpp"

struct sphereprox_run {
  sphereprox::ExperimentOutcome outcome;
  std::string report_text;
  std::string summary_text;
};

namespace {

thread_local std::string t_last_error;

sphereprox_status fail(sphereprox_status code, const char* what) {
  t_last_error = what;
  return code;
}

// Runs fn under the exception-to-status mapping. Derived classes must be
// matched before their bases, so ConfigError and DimensionMismatchError
// come ahead of InvalidInputError.
template <typename Fn>
sphereprox_status guarded(Fn&& fn) noexcept {
  t_last_error.clear();
  try {
    fn();
    return SPHEREPROX_OK;
  } catch (const sphereprox::ConfigError& e) {
    return fail(SPHEREPROX_ERR_CONFIG, e.what());
  } catch (const sphereprox::DimensionMismatchError& e) {
    return fail(SPHEREPROX_ERR_DIMENSION_MISMATCH, e.what());
  } catch (const sphereprox::InvalidInputError& e) {
    return fail(SPHEREPROX_ERR_INVALID_INPUT, e.what());
  } catch (const sphereprox::DegenerateGeodesicError& e) {
    return fail(SPHEREPROX_ERR_DEGENERATE_GEODESIC, e.what());
  } catch (const sphereprox::DomainError& e) {
    return fail(SPHEREPROX_ERR_DOMAIN, e.what());
  } catch (const sphereprox::NotImplementedError& e) {
    return fail(SPHEREPROX_ERR_NOT_IMPLEMENTED, e.what());
  } catch (const sphereprox::ConvergenceFailureError& e) {
    return fail(SPHEREPROX_ERR_CONVERGENCE_FAILURE, e.what());
  } catch (const sphereprox::IoError& e) {
    return fail(SPHEREPROX_ERR_IO, e.what());
  } catch (const sphereprox::Error& e) {
    return fail(SPHEREPROX_ERR_UNKNOWN, e.what());
  } catch (const std::exception& e) {
    return fail(SPHEREPROX_ERR_UNKNOWN, e.what());
  } catch (...) {
    return fail(SPHEREPROX_ERR_UNKNOWN, "unrecognized failure");
  }
}

char* dup_to_c(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string cell(double v, int width, int precision) {
  char buf[64];
  if (std::isnan(v)) {
    std::snprintf(buf, sizeof buf, "%*s", width, "-");
  } else {
    std::snprintf(buf, sizeof buf, "%*.*g", width, precision, v);
  }
  return buf;
}

// Row indices worth printing: 1, 2, 5, 10, 20, 50, ... and the last step.
std::vector<long long> milestone_steps(long long last_n) {
  std::vector<long long> marks;
  for (long long decade = 1; decade <= last_n; decade *= 10) {
    for (long long m : {1LL, 2LL, 5LL}) {
      if (decade * m <= last_n) marks.push_back(decade * m);
    }
    if (decade > last_n / 10) break;
  }
  if (marks.empty() || marks.back() != last_n) marks.push_back(last_n);
  return marks;
}

std::string render_summary(const sphereprox::ExperimentOutcome& oc) {
  const nlohmann::json& rep = oc.report;
  const auto& recs = oc.trace.step_records;
  std::string s;
  char line[512];

  std::snprintf(line, sizeof line,
                "scheme=%s  kappa=%g  steps=%d  termination=%s\n",
                rep.at("scheme").get<std::string>().c_str(),
                rep.at("kappa").get<double>(), rep.at("steps").get<int>(),
                rep.at("termination").get<std::string>().c_str());
  s += line;
  if (oc.exit_code != 0) s += "failure: " + oc.message + "\n";

  s += "hypotheses:\n";
  for (const auto& hc : rep.at("hypothesis_checks")) {
    s += hc.at("satisfied").get<bool>() ? "  [satisfied] " : "  [violated]  ";
    s += hc.at("condition").get<std::string>();
    s += "  (" + hc.at("method").get<std::string>() + ")\n";
  }

  if (recs.empty()) {
    s += "no completed steps\n";
    return s;
  }

  std::snprintf(line, sizeof line, "%7s %11s %11s %12s %14s %12s %12s\n", "n",
                "alpha_n", "lambda_n", "step_dist", "f(x_n)", "d(x_n,min)",
                "d(x_n,Pv)");
  s += line;
  for (long long n : milestone_steps(recs.back().n)) {
    const auto& r = recs[static_cast<size_t>(n - 1)];
    std::snprintf(line, sizeof line, "%7d", r.n);
    s += line;
    s += " " + cell(r.alpha, 11, 4) + " " + cell(r.lambda, 11, 4);
    s += " " + cell(r.step_distance, 12, 5);
    s += " " + cell(r.value_at_iterate, 14, 8);
    s += " " + cell(r.dist_to_minimizer, 12, 5);
    s += " " + cell(r.dist_to_projection, 12, 5) + "\n";
  }

  const auto& last = recs.back();
  s += "final: f=" + cell(last.value_at_iterate, 0, 10);
  s += "  last_step=" + cell(last.step_distance, 0, 4);
  if (!std::isnan(last.dist_to_minimizer))
    s += "  d_to_argmin=" + cell(last.dist_to_minimizer, 0, 4);
  if (!std::isnan(last.dist_to_projection))
    s += "  d_to_anchor_proj=" + cell(last.dist_to_projection, 0, 4);
  s += "\n";
  return s;
}

sphereprox_run* wrap_outcome(sphereprox::ExperimentOutcome outcome) {
  auto* h = new sphereprox_run{std::move(outcome), {}, {}};
  h->report_text = h->outcome.report.dump(2) + "\n";
  h->summary_text = render_summary(h->outcome);
  return h;
}

void require(const void* p, const char* name) {
  if (p == nullptr) {
    throw sphereprox::InvalidInputError(std::string(name) +
                                        " must not be null");
  }
}

}  // namespace

extern "C" {

const char* sphereprox_version(void) { return "0.1.0"; }

const char* sphereprox_last_error(void) { return t_last_error.c_str(); }

void sphereprox_free_string(char* s) { std::free(s); }

sphereprox_status sphereprox_run_config_file(const char* path,
                                             sphereprox_run** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto cfg = sphereprox::load_experiment_config(path);
    *out = wrap_outcome(sphereprox::run_experiment(cfg));
  });
}

sphereprox_status sphereprox_run_config_json(const char* json_text,
                                             const char* base_dir,
                                             sphereprox_run** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw sphereprox::ConfigError(std::string("config is not valid JSON: ") +
                                    e.what());
    }
    auto cfg = sphereprox::parse_experiment_config(doc);
    if (base_dir != nullptr && base_dir[0] != '\0') {
      const std::filesystem::path dir(base_dir);
      for (std::string* p : {&cfg.trace_csv_path, &cfg.report_json_path}) {
        std::filesystem::path fp(*p);
        if (fp.is_relative()) *p = (dir / fp).lexically_normal().string();
      }
    }
    *out = wrap_outcome(sphereprox::run_experiment(cfg));
  });
}

int sphereprox_run_exit_code(const sphereprox_run* h) {
  return h == nullptr ? -1 : h->outcome.exit_code;
}

const char* sphereprox_run_message(const sphereprox_run* h) {
  return h == nullptr ? "" : h->outcome.message.c_str();
}

const char* sphereprox_run_report_json(const sphereprox_run* h) {
  return h == nullptr ? "" : h->report_text.c_str();
}

const char* sphereprox_run_summary(const sphereprox_run* h) {
  return h == nullptr ? "" : h->summary_text.c_str();
}

int sphereprox_run_step_count(const sphereprox_run* h) {
  if (h == nullptr) return -1;
  return static_cast<int>(h->outcome.trace.step_records.size());
}

int sphereprox_run_point_dim(const sphereprox_run* h) {
  if (h == nullptr || h->outcome.trace.iterates.empty()) return -1;
  return h->outcome.trace.iterates.front().dim();
}

sphereprox_status sphereprox_run_step_record(const sphereprox_run* h, int i,
                                             double out_record[8]) {
  return guarded([&] {
    require(h, "run handle");
    require(out_record, "out_record");
    const auto& recs = h->outcome.trace.step_records;
    if (i < 0 || static_cast<size_t>(i) >= recs.size()) {
      throw sphereprox::InvalidInputError(
          "step index " + std::to_string(i) + " out of range [0, " +
          std::to_string(recs.size()) + ")");
    }
    const auto& r = recs[static_cast<size_t>(i)];
    out_record[0] = static_cast<double>(r.n);
    out_record[1] = r.alpha;
    out_record[2] = r.lambda;
    out_record[3] = r.step_distance;
    out_record[4] = r.value_at_iterate;
    out_record[5] = r.value_at_resolvent;
    out_record[6] = r.dist_to_minimizer;
    out_record[7] = r.dist_to_projection;
  });
}

sphereprox_status sphereprox_run_iterate(const sphereprox_run* h, int i,
                                         double* coords, int coords_len) {
  return guarded([&] {
    require(h, "run handle");
    require(coords, "coords");
    const auto& pts = h->outcome.trace.iterates;
    if (i < 0 || static_cast<size_t>(i) >= pts.size()) {
      throw sphereprox::InvalidInputError(
          "iterate index " + std::to_string(i) + " out of range [0, " +
          std::to_string(pts.size()) + ")");
    }
    const auto& p = pts[static_cast<size_t>(i)];
    if (coords_len != p.dim()) {
      throw sphereprox::DimensionMismatchError(
          "coords_len " + std::to_string(coords_len) +
          " does not match point dimension " + std::to_string(p.dim()));
    }
    for (int k = 0; k < p.dim(); ++k) coords[k] = p.coords()[k];
  });
}

void sphereprox_run_free(sphereprox_run* h) { delete h; }

sphereprox_status sphereprox_check_invariants(const char* suite, uint64_t seed,
                                              int samples,
                                              const double* tolerance_override,
                                              char** report_json_out,
                                              int* pass_out) {
  if (report_json_out != nullptr) *report_json_out = nullptr;
  return guarded([&] {
    require(suite, "suite");
    require(report_json_out, "report_json_out");
    require(pass_out, "pass_out");
    std::optional<double> tol;
    if (tolerance_override != nullptr) tol = *tolerance_override;
    const int n = samples > 0 ? samples : sphereprox::kDefaultCheckSamples;
    const auto report = sphereprox::check_invariants(suite, seed, n, tol);
    *report_json_out =
        dup_to_c(sphereprox::check_report_to_json(report).dump(2) + "\n");
    *pass_out = report.pass ? 1 : 0;
  });
}

}  // extern "C"
