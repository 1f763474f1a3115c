#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "movdom/scenarios.hpp"

namespace movdom::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kInvariantFailure = 2, kConfigError = 3 };

struct RunConfig {
  std::string command = "run";
  std::string scenario = "moving_interval";
  // cells == 0 selects the scenario default (64 for rotation, 200 otherwise)
  ScenarioParameters params = [] {
    ScenarioParameters p;
    p.cells = 0;
    p.smooth = true;
    return p;
  }();
  double dt = 1e-3;
  double solver_tol = 1e-12;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.02, 0.01};
  std::string output = "movdom_out";
  int snapshot_stride = 0;
  std::uint64_t seed = 0;
  bool self_test = false;

  // Acceptance thresholds echoed into the manifest.
  double norm_tol = 1e-10;
  double hermitian_tol = 1e-12;
  double identity_tol = 1e-12;
  double fidelity_tol = 1e-5;
  double overlap_target = 0.99;
  double moser_tol = 1e-3;
  double order_target = 2.0;
  double order_tol = 0.3;

  // moser
  std::string density = "sine";  // uniform | sine | bump
  double amplitude = 0.05;
  int dimension = 2;

  // converge
  std::string ladder = "time";  // time | space
  std::vector<double> dt_ladder{4e-3, 2e-3, 1e-3, 5e-4};
  std::vector<int> grid_ladder{25, 50, 100, 200};

  /// Throws ConfigInvalid on inconsistent values.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Merges a JSON document into the config. Unknown keys are rejected.
void apply_json(RunConfig& config, const nlohmann::json& doc);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunManifest {
  nlohmann::json config;
  std::string version = kVersion;
  std::vector<std::string> files;
  std::vector<Check> checks;
  nlohmann::json results = nlohmann::json::object();

  bool passed() const;
  nlohmann::json to_json() const;
};

RunManifest run_scenario(const RunConfig& config);
RunManifest run_adiabatic(const RunConfig& config);
RunManifest run_moser(const RunConfig& config);
RunManifest convergence_report(const RunConfig& config);

/// Dispatches on config.command, writes manifest.json and returns the
/// exit code.
int execute(const RunConfig& config);

/// Full command line entry point.
int main_entry(int argc, char** argv);

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace movdom::cli
