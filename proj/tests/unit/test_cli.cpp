#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "movdom/errors.hpp"

using namespace movdom;
using namespace movdom::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("movdom_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_run(const std::string& name) {
  RunConfig c;
  c.scenario = "moving_interval";
  c.params.cells = 50;
  c.dt = 1e-2;
  c.output = scratch_dir(name).string();
  return c;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "movdom");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(Cli, FittedOrder) {
  EXPECT_NEAR(fitted_order({0.1, 0.05, 0.025}, {0.01, 0.0025, 0.000625}), 2.0, 1e-12);
  EXPECT_THROW(fitted_order({0.1}, {0.01}), ConfigInvalid);
}

TEST(Cli, JsonRoundTripAndUnknownKeys) {
  RunConfig c;
  c.scenario = "rotation";
  c.params.omega = 2.5;
  c.epsilons = {0.3, 0.1};
  RunConfig d;
  apply_json(d, c.to_json());
  EXPECT_EQ(d.scenario, "rotation");
  EXPECT_DOUBLE_EQ(d.params.omega, 2.5);
  EXPECT_EQ(d.epsilons, c.epsilons);
  EXPECT_THROW(apply_json(d, nlohmann::json{{"colour", 1}}), ConfigInvalid);
  EXPECT_THROW(apply_json(d, nlohmann::json{{"scenario", {{"speed", 1}}}}), ConfigInvalid);
  EXPECT_THROW(apply_json(d, nlohmann::json{{"dt", "fast"}}), ConfigInvalid);
}

TEST(Cli, ValidationRejectsBadValues) {
  RunConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), ConfigInvalid);
  c = RunConfig{};
  c.epsilons = {0.1, 0.2};
  EXPECT_THROW(c.validate(), ConfigInvalid);
  c = RunConfig{};
  c.density = "spiky";
  EXPECT_THROW(c.validate(), ConfigInvalid);
}

TEST(Cli, RunWritesTraceAndManifest) {
  RunConfig c = small_run("run");
  c.snapshot_stride = 50;
  EXPECT_EQ(execute(c), kOk);
  const fs::path dir(c.output);
  const std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,norm,energy,overlap_0");
  EXPECT_TRUE(fs::exists(dir / "snapshots" / "0000.csv"));
  EXPECT_EQ(slurp(dir / "snapshots" / "0000.csv").substr(0, 12), "y,re,im,abs2");
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(manifest["passed"].get<bool>());
  for (const auto& f : manifest["files"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>()));
  EXPECT_EQ(manifest["config"]["dt"].get<double>(), 1e-2);
}

TEST(Cli, RunIsDeterministic) {
  RunConfig a = small_run("det_a");
  RunConfig b = small_run("det_b");
  a.self_test = b.self_test = true;
  ASSERT_EQ(execute(a), kOk);
  ASSERT_EQ(execute(b), kOk);
  EXPECT_EQ(slurp(fs::path(a.output) / "trace.csv"), slurp(fs::path(b.output) / "trace.csv"));
}

TEST(Cli, InvariantFailureStillWritesManifest) {
  RunConfig c = small_run("fail");
  c.norm_tol = 0.0;
  c.params.l1 = 3.0;
  EXPECT_EQ(execute(c), kInvariantFailure);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(c.output) / "manifest.json"));
  EXPECT_FALSE(manifest["passed"].get<bool>());
}

TEST(Cli, ConfigErrorsExitThree) {
  RunConfig c = small_run("bad");
  c.scenario = "spiral";
  EXPECT_EQ(execute(c), kConfigError);
  c = small_run("bad_moser");
  c.command = "moser";
  c.amplitude = -2.0;
  EXPECT_EQ(execute(c), kConfigError);
  c = small_run("bad_ladder");
  c.command = "converge";
  c.dt_ladder = {1e-3};
  EXPECT_EQ(execute(c), kConfigError);
}

TEST(Cli, MoserUniformDensityIsExact) {
  RunConfig c = small_run("moser");
  c.command = "moser";
  c.density = "uniform";
  c.params.cells = 16;
  EXPECT_EQ(execute(c), kOk);
  const auto report = nlohmann::json::parse(slurp(fs::path(c.output) / "report.json"));
  EXPECT_LE(report["residual"].get<double>(), 1e-12);
  EXPECT_TRUE(fs::exists(fs::path(c.output) / "phi.csv"));
}

TEST(Cli, AdiabaticSingleEpsilonGivesOneRow) {
  RunConfig c = small_run("adiabatic");
  c.command = "adiabatic";
  c.scenario = "static";
  c.epsilons = {0.5};
  EXPECT_EQ(execute(c), kOk);
  const std::string csv = slurp(fs::path(c.output) / "adiabatic.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Cli, CommandLineOverridesConfigFile) {
  const fs::path dir = scratch_dir("flags");
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"scenario": {"name": "static"}, "grid": 30, "dt": 0.05})";
  const fs::path out = dir / "out";
  EXPECT_EQ(run_args({"run", "--config", cfg.string(), "--dt", "0.1", "--output", out.string()}),
            kOk);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_DOUBLE_EQ(manifest["config"]["dt"].get<double>(), 0.1);
  EXPECT_EQ(manifest["config"]["grid"].get<int>(), 30);
  EXPECT_EQ(manifest["config"]["scenario"]["name"].get<std::string>(), "static");
  EXPECT_EQ(run_args({"run", "--scenario", "spiral", "--output", out.string()}), kConfigError);
  EXPECT_EQ(run_args({"run", "--bogus-flag"}), kConfigError);
  EXPECT_EQ(run_args({"list"}), kOk);
}
