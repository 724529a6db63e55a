// Command-line front end. Everything numerical happens behind the C
// interface; this file only parses arguments, shuttles files, and formats
// what comes back.
//
// Exit codes: 0 success, 1 solver or invariant failure, 2 usage/config/io
// trouble.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphereprox.h"

namespace {

int exit_code_for(sphereprox_status status) {
  switch (status) {
    case SPHEREPROX_OK:
      return 0;
    case SPHEREPROX_ERR_CONVERGENCE_FAILURE:
      return 1;
    default:
      return 2;
  }
}

int cmd_run(const std::string& config_path) {
  sphereprox_run* run = nullptr;
  const sphereprox_status status =
      sphereprox_run_config_file(config_path.c_str(), &run);
  if (status != SPHEREPROX_OK) {
    std::fprintf(stderr, "error: %s\n", sphereprox_last_error());
    return exit_code_for(status);
  }
  std::fputs(sphereprox_run_summary(run), stdout);
  const int rc = sphereprox_run_exit_code(run);
  if (rc != 0) {
    std::fprintf(stderr, "error: %s\n", sphereprox_run_message(run));
  }
  sphereprox_run_free(run);
  return rc == 0 ? 0 : 1;
}

std::string describe_worst(const nlohmann::json& prop) {
  const auto& worst = prop.at("worst");
  if (!worst.is_number()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", worst.get<double>());
  return buf;
}

int cmd_check(const std::string& suite, uint64_t seed, int samples,
              std::optional<double> tolerance) {
  char* report_text = nullptr;
  int pass = 0;
  double tol_value = tolerance.value_or(0.0);
  const sphereprox_status status = sphereprox_check_invariants(
      suite.c_str(), seed, samples, tolerance ? &tol_value : nullptr,
      &report_text, &pass);
  if (status != SPHEREPROX_OK) {
    std::fprintf(stderr, "error: %s\n", sphereprox_last_error());
    return exit_code_for(status);
  }
  const auto report = nlohmann::json::parse(report_text);
  sphereprox_free_string(report_text);

  for (const auto& s : report.at("suites")) {
    std::printf("suite %s:\n", s.at("suite").get<std::string>().c_str());
    for (const auto& p : s.at("properties")) {
      const bool prop_pass = p.at("pass").get<bool>();
      std::printf("  [%s] %-34s worst %-10s (%s, tol %.3g, %lld samples)\n",
                  prop_pass ? "pass" : "FAIL",
                  p.at("name").get<std::string>().c_str(),
                  describe_worst(p).c_str(),
                  p.at("rule").get<std::string>().c_str(),
                  p.at("tolerance").get<double>(),
                  p.at("samples").get<long long>());
      const auto& witness = p.at("witness");
      if (!prop_pass && witness.is_string() &&
          !witness.get<std::string>().empty()) {
        std::printf("         witness: %s\n",
                    witness.get<std::string>().c_str());
      }
    }
  }
  std::printf("%s\n", pass != 0 ? "PASS" : "FAIL");
  return pass != 0 ? 0 : 1;
}

int cmd_sweep(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::fprintf(stderr, "error: %s is not a directory\n", dir.c_str());
    return 2;
  }
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      configs.push_back(entry.path());
    }
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::fprintf(stderr, "error: no .json configs in %s\n", dir.c_str());
    return 2;
  }

  int worst = 0;
  for (const auto& path : configs) {
    const std::string name = path.filename().string();
    sphereprox_run* run = nullptr;
    const sphereprox_status status =
        sphereprox_run_config_file(path.string().c_str(), &run);
    int rc = 0;
    if (status != SPHEREPROX_OK) {
      rc = exit_code_for(status);
      std::printf("%s: error (%s)\n", name.c_str(), sphereprox_last_error());
    } else if (sphereprox_run_exit_code(run) != 0) {
      rc = 1;
      std::printf("%s: solver failure (%s)\n", name.c_str(),
                  sphereprox_run_message(run));
    } else {
      const int steps = sphereprox_run_step_count(run);
      double rec[8] = {0};
      sphereprox_run_step_record(run, steps - 1, rec);
      std::printf("%s: ok  steps=%d  final_f=%.8g  last_step=%.3g\n",
                  name.c_str(), steps, rec[4], rec[3]);
    }
    sphereprox_run_free(run);
    worst = std::max(worst, rc);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal-point minimization of convex functions on spherical "
               "caps, with invariant sweeps over the numerical kernels"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand(
      "run", "Run one experiment config; writes its trace CSV and report "
             "JSON and prints a convergence table");
  run_cmd->add_option("config", config_path, "experiment config (JSON)")
      ->required();

  std::string suite;
  uint64_t seed = 1;
  int samples = 0;
  double tolerance = 0.0;
  auto* check_cmd = app.add_subcommand(
      "check", "Run an invariant sweep (geometry, functions, resolvent, "
               "diagnostics, or all)");
  check_cmd->add_option("suite", suite, "suite name")->required();
  check_cmd->add_option("--seed", seed, "RNG seed (default 1)");
  check_cmd->add_option("--samples", samples, "samples per property")
      ->check(CLI::PositiveNumber);
  auto* tol_opt = check_cmd->add_option(
      "--tolerance", tolerance, "override every property tolerance");

  std::string sweep_dir;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run every *.json config in a directory, one result line "
               "each; exits with the worst per-file code");
  sweep_cmd->add_option("dir", sweep_dir, "config directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*run_cmd) return cmd_run(config_path);
  if (*check_cmd) {
    std::optional<double> tol;
    if (tol_opt->count() > 0) tol = tolerance;
    return cmd_check(suite, seed, samples, tol);
  }
  return cmd_sweep(sweep_dir);
}
