// Exercises the C interface the way an external client would: through the
// shared library alone, with JSON parsing on the test side only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sphereprox.h"

namespace {

std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "sphereprox_capi_tests";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

nlohmann::json base_config(const std::string& algorithm) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["space"] = {{"pole", {0.0, 0.0, 1.0}}};
  j["function"] = {{"kind", "neg_cos_distance"}, {"anchor", {0.2, 0.1, 1.0}}};
  j["algorithm"] = algorithm;
  nlohmann::json sched;
  if (algorithm != "ppa") {
    sched["alpha"] = {{"family", "constant"}, {"value", 0.5}};
  }
  sched["lambda"] = {{"family", "constant"}, {"value", 1.0}};
  j["schedules"] = sched;
  j["init"] = {0.1, -0.2, 1.0};
  if (algorithm == "halpern") j["anchor"] = {-0.15, 0.1, 1.0};
  j["n_max"] = 30;
  j["stop_tol"] = 0.0;
  j["seed"] = 7;
  j["outputs"] = {{"trace_csv_path", "out/trace.csv"},
                  {"report_json_path", "report.json"}};
  return j;
}

}  // namespace

TEST_CASE("version string and clean error state") {
  const char* v = sphereprox_version();
  REQUIRE(v != nullptr);
  CHECK(std::string(v) == "0.1.0");
  CHECK(sphereprox_last_error() != nullptr);
}

TEST_CASE("run from a json document writes outputs and exposes the trace") {
  const auto dir = scratch_dir() / "json_run";
  std::filesystem::create_directories(dir);
  const std::string doc = base_config("mann").dump();

  sphereprox_run* run = nullptr;
  REQUIRE(sphereprox_run_config_json(doc.c_str(), dir.string().c_str(),
                                     &run) == SPHEREPROX_OK);
  REQUIRE(run != nullptr);
  CHECK(std::string(sphereprox_last_error()).empty());
  CHECK(sphereprox_run_exit_code(run) == 0);
  CHECK(std::string(sphereprox_run_message(run)).empty());
  CHECK(sphereprox_run_step_count(run) == 30);
  CHECK(sphereprox_run_point_dim(run) == 3);

  // Relative output paths resolve against base_dir.
  CHECK(std::filesystem::exists(dir / "out" / "trace.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));

  const auto report = nlohmann::json::parse(sphereprox_run_report_json(run));
  CHECK(report.at("scheme") == "mann");
  CHECK(report.at("steps") == 30);
  CHECK(report.at("failure_message").is_null());

  const std::string summary = sphereprox_run_summary(run);
  CHECK(summary.find("scheme=mann") != std::string::npos);
  CHECK(summary.find("hypotheses:") != std::string::npos);
  CHECK(summary.find("[satisfied]") != std::string::npos);
  CHECK(summary.find("step_dist") != std::string::npos);
  CHECK(summary.find("\n     30 ") != std::string::npos);  // last table row
  CHECK(summary.find("final: f=") != std::string::npos);

  double rec[8];
  REQUIRE(sphereprox_run_step_record(run, 0, rec) == SPHEREPROX_OK);
  CHECK(rec[0] == 1.0);
  CHECK(rec[1] == 0.5);
  CHECK(rec[2] == 1.0);
  CHECK(rec[3] > 0.0);
  CHECK(rec[4] > rec[5]);           // the proximal point improves f
  CHECK(!std::isnan(rec[6]));       // certified minimizer registered
  REQUIRE(sphereprox_run_step_record(run, 29, rec) == SPHEREPROX_OK);
  CHECK(rec[0] == 30.0);
  CHECK(rec[6] < 1e-2);

  // step_count steps means step_count + 1 stored iterates.
  double coords[3];
  REQUIRE(sphereprox_run_iterate(run, 0, coords, 3) == SPHEREPROX_OK);
  const double init_norm = std::sqrt(coords[0] * coords[0] +
                                     coords[1] * coords[1] +
                                     coords[2] * coords[2]);
  CHECK(init_norm == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(sphereprox_run_iterate(run, 30, coords, 3) == SPHEREPROX_OK);
  CHECK(sphereprox_run_iterate(run, 31, coords, 3) ==
        SPHEREPROX_ERR_INVALID_INPUT);
  CHECK(!std::string(sphereprox_last_error()).empty());
  CHECK(sphereprox_run_iterate(run, 0, coords, 2) ==
        SPHEREPROX_ERR_DIMENSION_MISMATCH);
  CHECK(sphereprox_run_step_record(run, 30, rec) ==
        SPHEREPROX_ERR_INVALID_INPUT);

  sphereprox_run_free(run);
}

TEST_CASE("run from a config file resolves outputs against the config dir") {
  const auto dir = scratch_dir() / "file_run";
  std::filesystem::create_directories(dir);
  const auto cfg_path = dir / "cfg.json";
  {
    auto j = base_config("halpern");
    j["outputs"] = {{"trace_csv_path", "halpern.csv"},
                    {"report_json_path", "halpern_report.json"}};
    std::ofstream out(cfg_path);
    out << j.dump(2) << "\n";
  }

  sphereprox_run* run = nullptr;
  REQUIRE(sphereprox_run_config_file(cfg_path.string().c_str(), &run) ==
          SPHEREPROX_OK);
  REQUIRE(run != nullptr);
  CHECK(sphereprox_run_exit_code(run) == 0);
  CHECK(std::filesystem::exists(dir / "halpern.csv"));
  CHECK(std::filesystem::exists(dir / "halpern_report.json"));

  // The anchored scheme registers the anchor projection reference.
  double rec[8];
  REQUIRE(sphereprox_run_step_record(run, 0, rec) == SPHEREPROX_OK);
  CHECK(!std::isnan(rec[7]));
  CHECK(sphereprox_run_summary(run) != nullptr);
  CHECK(std::string(sphereprox_run_summary(run)).find("scheme=halpern") !=
        std::string::npos);
  sphereprox_run_free(run);
}

TEST_CASE("repeated runs return byte-identical report and summary text") {
  const auto dir_a = scratch_dir() / "det_a";
  const auto dir_b = scratch_dir() / "det_b";
  std::filesystem::create_directories(dir_a);
  std::filesystem::create_directories(dir_b);
  const std::string doc = base_config("mann").dump();

  sphereprox_run* a = nullptr;
  sphereprox_run* b = nullptr;
  REQUIRE(sphereprox_run_config_json(doc.c_str(), dir_a.string().c_str(),
                                     &a) == SPHEREPROX_OK);
  REQUIRE(sphereprox_run_config_json(doc.c_str(), dir_b.string().c_str(),
                                     &b) == SPHEREPROX_OK);
  CHECK(std::string(sphereprox_run_report_json(a)) ==
        std::string(sphereprox_run_report_json(b)));
  CHECK(std::string(sphereprox_run_summary(a)) ==
        std::string(sphereprox_run_summary(b)));
  sphereprox_run_free(a);
  sphereprox_run_free(b);
}

TEST_CASE("config and filesystem trouble maps to statuses") {
  sphereprox_run* run = reinterpret_cast<sphereprox_run*>(0x1);
  CHECK(sphereprox_run_config_json("{not json", nullptr, &run) ==
        SPHEREPROX_ERR_CONFIG);
  CHECK(run == nullptr);
  CHECK(!std::string(sphereprox_last_error()).empty());

  auto outside = base_config("mann");
  outside["init"] = {1.0, 0.0, 0.0};  // a quarter turn from the pole
  const std::string doc = outside.dump();
  CHECK(sphereprox_run_config_json(doc.c_str(),
                                   scratch_dir().string().c_str(),
                                   &run) == SPHEREPROX_ERR_CONFIG);
  CHECK(run == nullptr);

  CHECK(sphereprox_run_config_file(
            (scratch_dir() / "missing.json").string().c_str(), &run) ==
        SPHEREPROX_ERR_IO);
  CHECK(run == nullptr);

  CHECK(sphereprox_run_config_json(nullptr, nullptr, &run) ==
        SPHEREPROX_ERR_INVALID_INPUT);
  CHECK(sphereprox_run_config_json("{}", nullptr, nullptr) ==
        SPHEREPROX_ERR_INVALID_INPUT);
  CHECK(sphereprox_run_config_file(nullptr, &run) ==
        SPHEREPROX_ERR_INVALID_INPUT);
}

TEST_CASE("null run handles are tolerated by the getters") {
  CHECK(sphereprox_run_exit_code(nullptr) == -1);
  CHECK(sphereprox_run_step_count(nullptr) == -1);
  CHECK(sphereprox_run_point_dim(nullptr) == -1);
  CHECK(std::string(sphereprox_run_message(nullptr)).empty());
  CHECK(std::string(sphereprox_run_report_json(nullptr)).empty());
  CHECK(std::string(sphereprox_run_summary(nullptr)).empty());
  sphereprox_run_free(nullptr);

  double rec[8];
  CHECK(sphereprox_run_step_record(nullptr, 0, rec) ==
        SPHEREPROX_ERR_INVALID_INPUT);
}

TEST_CASE("invariant checks report through the C surface") {
  char* report_text = nullptr;
  int pass = -1;
  REQUIRE(sphereprox_check_invariants("geometry", 2, 25, nullptr,
                                      &report_text, &pass) == SPHEREPROX_OK);
  REQUIRE(report_text != nullptr);
  CHECK(pass == 1);
  const auto report = nlohmann::json::parse(report_text);
  CHECK(report.at("suite") == "geometry");
  CHECK(report.at("seed") == 2);
  CHECK(report.at("samples") == 25);
  CHECK(report.at("pass") == true);
  CHECK(report.at("suites").size() == 1);
  for (const auto& prop : report.at("suites")[0].at("properties")) {
    CHECK(prop.at("pass") == true);
  }
  sphereprox_free_string(report_text);

  // An absurdly tight tolerance has to fail and still produce a report.
  report_text = nullptr;
  double tight = 1e-15;
  REQUIRE(sphereprox_check_invariants("diagnostics", 1, 40, &tight,
                                      &report_text, &pass) == SPHEREPROX_OK);
  REQUIRE(report_text != nullptr);
  CHECK(pass == 0);
  CHECK(nlohmann::json::parse(report_text).at("pass") == false);
  sphereprox_free_string(report_text);

  report_text = reinterpret_cast<char*>(0x1);
  CHECK(sphereprox_check_invariants("algebra", 1, 10, nullptr, &report_text,
                                    &pass) == SPHEREPROX_ERR_CONFIG);
  CHECK(report_text == nullptr);
  CHECK(sphereprox_check_invariants(nullptr, 1, 10, nullptr, &report_text,
                                    &pass) == SPHEREPROX_ERR_INVALID_INPUT);
  CHECK(sphereprox_check_invariants("geometry", 1, 10, nullptr, nullptr,
                                    &pass) == SPHEREPROX_ERR_INVALID_INPUT);
  CHECK(sphereprox_check_invariants("geometry", 1, 10, nullptr, &report_text,
                                    nullptr) == SPHEREPROX_ERR_INVALID_INPUT);
}
