#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "movdom/adiabatic.hpp"
#include "movdom/errors.hpp"
#include "movdom/moser.hpp"
#include "movdom/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace movdom::cli {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

int resolved_cells(const RunConfig& c) {
  if (c.params.cells > 0) return c.params.cells;
  return c.scenario == "rotation" ? 64 : 200;
}

ScenarioDef make_scenario(const RunConfig& c) {
  ScenarioParameters p = c.params;
  p.cells = resolved_cells(c);
  return build_scenario(c.scenario, p);
}

fs::path prepare_output(const RunConfig& c) {
  const fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigInvalid("output directory '" + c.output + "' is not writable");
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string trace_csv(const EvolutionTrace& trace) {
  std::string s = "t,norm,energy";
  const std::size_t k = trace.overlaps.empty() ? 0 : trace.overlaps.front().size();
  for (std::size_t j = 0; j < k; ++j) s += fmt::format(",overlap_{}", j);
  s += '\n';
  for (Index r = 0; r < trace.records(); ++r) {
    s += num(trace.times[r]) + ',' + num(trace.norms[r]) + ',' + num(trace.energies[r]);
    for (double o : trace.overlaps[r]) s += ',' + num(o);
    s += '\n';
  }
  return s;
}

std::string snapshot_csv(const GridFunction& v) {
  const GridPtr& g = v.grid();
  std::string s = g->dimension() == 1 ? "y,re,im,abs2\n" : "y1,y2,re,im,abs2\n";
  for (Index i = 0; i < g->node_count(); ++i) {
    const Vec y = g->node(i);
    for (int k = 0; k < g->dimension(); ++k) s += num(y(k)) + ',';
    s += num(v(i).real()) + ',' + num(v(i).imag()) + ',' + num(std::norm(v(i))) + '\n';
  }
  return s;
}

void add_check(RunManifest& m, const std::string& name, double value,
               double threshold, bool pass) {
  m.checks.push_back({name, value, threshold, pass});
}

GridFunction normalized(const GridFunction& v) {
  GridFunction w = v;
  w.values() /= norm(v);
  return w;
}

// Norm used for state differences: the lumped L2 norm on the reference grid.
double distance(const GridFunction& a, const GridFunction& b) {
  GridFunction d = a;
  d.values() -= b.values();
  return norm(d);
}

}  // namespace

void RunConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigInvalid("--dt must be positive");
  if (!(solver_tol > 0.0)) throw ConfigInvalid("solver tolerance must be positive");
  if (params.cells != 0 && params.cells < 2) throw ConfigInvalid("--grid must be at least 2");
  if (!(params.l0 > 0.0) || !(params.l1 > 0.0)) throw ConfigInvalid("lengths must be positive");
  if (!(params.t_end > 0.0)) throw ConfigInvalid("--t-end must be positive");
  if (snapshot_stride < 0) throw ConfigInvalid("snapshot stride must be >= 0");
  if (output.empty()) throw ConfigInvalid("--output must not be empty");
  if (epsilons.empty()) throw ConfigInvalid("--epsilon needs at least one value");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw ConfigInvalid("epsilon values must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw ConfigInvalid("epsilon list must be strictly decreasing");
    }
  }
  if (dimension != 1 && dimension != 2) throw ConfigInvalid("dimension must be 1 or 2");
  if (!std::isfinite(amplitude)) throw ConfigInvalid("amplitude must be finite");
  const std::set<std::string> densities{"uniform", "sine", "bump"};
  if (!densities.count(density)) {
    throw ConfigInvalid("unknown density '" + density + "' (uniform, sine, bump)");
  }
  if (ladder != "time" && ladder != "space") {
    throw ConfigInvalid("ladder must be 'time' or 'space'");
  }
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["scenario"] = {{"name", scenario},   {"l0", params.l0},
                   {"l1", params.l1},    {"ramp", params.smooth ? "smooth" : "linear"},
                   {"omega", params.omega}, {"accel", params.accel},
                   {"f_rate", params.f_rate}, {"f_curv", params.f_curv},
                   {"t_end", params.t_end}};
  j["grid"] = params.cells;
  j["bc"] = to_string(params.bc);
  j["dt"] = dt;
  j["solver_tol"] = solver_tol;
  j["epsilon"] = epsilons;
  j["output"] = output;
  j["snapshot_stride"] = snapshot_stride;
  j["seed"] = seed;
  j["self_test"] = self_test;
  j["tolerances"] = {{"norm", norm_tol},          {"hermitian", hermitian_tol},
                     {"identity", identity_tol},  {"fidelity", fidelity_tol},
                     {"overlap", overlap_target}, {"moser", moser_tol},
                     {"order", order_target},     {"order_tol", order_tol}};
  j["moser"] = {{"density", density}, {"amplitude", amplitude}, {"dimension", dimension}};
  j["converge"] = {{"ladder", ladder}, {"dt", dt_ladder}, {"grid", grid_ladder}};
  return j;
}

void apply_json(RunConfig& c, const json& doc) {
  if (!doc.is_object()) throw ConfigInvalid("configuration must be a JSON object");
  auto reject = [](const std::string& where, const std::string& key) {
    throw ConfigInvalid("unknown configuration key '" + where + key + "'");
  };
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "command") {
        c.command = value.get<std::string>();
      } else if (key == "scenario") {
        if (value.is_string()) {
          c.scenario = value.get<std::string>();
          continue;
        }
        for (const auto& [k, v] : value.items()) {
          if (k == "name") c.scenario = v.get<std::string>();
          else if (k == "l0") c.params.l0 = v.get<double>();
          else if (k == "l1") c.params.l1 = v.get<double>();
          else if (k == "ramp") c.params.smooth = v.get<std::string>() != "linear";
          else if (k == "omega") c.params.omega = v.get<double>();
          else if (k == "accel") c.params.accel = v.get<double>();
          else if (k == "f_rate") c.params.f_rate = v.get<double>();
          else if (k == "f_curv") c.params.f_curv = v.get<double>();
          else if (k == "t_end") c.params.t_end = v.get<double>();
          else reject("scenario.", k);
        }
      } else if (key == "grid") {
        c.params.cells = value.get<int>();
      } else if (key == "bc") {
        c.params.bc = parse_boundary_condition(value.get<std::string>());
      } else if (key == "dt") {
        c.dt = value.get<double>();
      } else if (key == "solver_tol") {
        c.solver_tol = value.get<double>();
      } else if (key == "epsilon") {
        c.epsilons = value.get<std::vector<double>>();
      } else if (key == "output") {
        c.output = value.get<std::string>();
      } else if (key == "snapshot_stride") {
        c.snapshot_stride = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "self_test") {
        c.self_test = value.get<bool>();
      } else if (key == "tolerances") {
        for (const auto& [k, v] : value.items()) {
          if (k == "norm") c.norm_tol = v.get<double>();
          else if (k == "hermitian") c.hermitian_tol = v.get<double>();
          else if (k == "identity") c.identity_tol = v.get<double>();
          else if (k == "fidelity") c.fidelity_tol = v.get<double>();
          else if (k == "overlap") c.overlap_target = v.get<double>();
          else if (k == "moser") c.moser_tol = v.get<double>();
          else if (k == "order") c.order_target = v.get<double>();
          else if (k == "order_tol") c.order_tol = v.get<double>();
          else reject("tolerances.", k);
        }
      } else if (key == "moser") {
        for (const auto& [k, v] : value.items()) {
          if (k == "density") c.density = v.get<std::string>();
          else if (k == "amplitude") c.amplitude = v.get<double>();
          else if (k == "dimension") c.dimension = v.get<int>();
          else reject("moser.", k);
        }
      } else if (key == "converge") {
        for (const auto& [k, v] : value.items()) {
          if (k == "ladder") c.ladder = v.get<std::string>();
          else if (k == "dt") c.dt_ladder = v.get<std::vector<double>>();
          else if (k == "grid") c.grid_ladder = v.get<std::vector<int>>();
          else reject("converge.", k);
        }
      } else {
        reject("", key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("malformed configuration: ") + e.what());
  }
}

bool RunManifest::passed() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

json RunManifest::to_json() const {
  json j;
  j["version"] = version;
  j["config"] = config;
  j["files"] = files;
  json summary = json::array();
  for (const Check& c : checks) {
    summary.push_back({{"name", c.name}, {"value", c.value},
                       {"threshold", c.threshold}, {"pass", c.pass}});
  }
  j["acceptance"] = summary;
  j["passed"] = passed();
  j["results"] = results;
  return j;
}

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw ConfigInvalid("an order fit needs at least two ladder points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunManifest run_scenario(const RunConfig& c) {
  c.validate();
  RunManifest m;
  m.config = c.to_json();
  const ScenarioDef s = make_scenario(c);
  const fs::path dir = prepare_output(c);

  const GridFunction v0 = s.initial_state();
  PropagatorConfig pc;
  pc.dt = c.dt;
  pc.t_start = s.t_start;
  pc.t_end = s.t_end;
  pc.solver_tol = c.solver_tol;
  pc.snapshot_stride = c.snapshot_stride;
  pc.references = {normalized(v0)};
  const EvolutionTrace trace = evolve(s.assembler(), v0, pc);

  write_text(dir / "trace.csv", trace_csv(trace));
  m.files.push_back("trace.csv");
  if (c.snapshot_stride > 0) {
    fs::create_directories(dir / "snapshots");
    for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
      const std::string name = fmt::format("snapshots/{:04d}.csv", k);
      write_text(dir / name, snapshot_csv(trace.snapshots[k].v));
      m.files.push_back(name);
    }
  }

  const double drift = trace.max_norm_drift();
  m.results["scenario"] = s.name;
  m.results["steps"] = trace.records() - 1;
  m.results["initial_norm"] = trace.norms.front();
  m.results["final_norm"] = trace.norms.back();
  m.results["max_norm_drift"] = drift;
  m.results["final_energy"] = trace.energies.back();
  if (is_hermitian(s.bc)) {
    add_check(m, "norm_drift", drift, c.norm_tol, drift <= c.norm_tol);
  } else {
    const double ratio = std::pow(trace.norms.back() / trace.norms.front(), 2);
    m.results["norm2_ratio"] = ratio;
  }

  if (c.self_test) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> time(s.t_start, s.t_end);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      worst = std::max(worst, hermiticity_residual(s.hamiltonian(time(rng)).matrix));
    }
    m.results["hermiticity_residual"] = worst;
    if (is_hermitian(s.bc)) {
      add_check(m, "hermiticity", worst, c.hermitian_tol, worst <= c.hermitian_tol);
    }
    if (s.name == "rotation") {
      const RotationAssemblies r =
          rotation_assemblies(c.params.omega, resolved_cells(c), time(rng));
      m.results["rotation_identity_residual"] = r.transport_vs_magnetic;
      m.results["rotation_general_residual"] = r.general_vs_magnetic;
      add_check(m, "rotation_identity", r.transport_vs_magnetic, c.identity_tol,
                r.transport_vs_magnetic <= c.identity_tol);
      add_check(m, "rotation_general", r.general_vs_magnetic, c.identity_tol,
                r.general_vs_magnetic <= c.identity_tol);
    } else if (s.gauge && s.reduced && s.bc == BoundaryCondition::Dirichlet) {
      const double compat = gauge_compatibility_residual_random(
          *s.gauge, s.family, s.grid, s.t_start, s.t_end, 100, c.seed);
      add_check(m, "gauge_compatibility", compat, 1e-10, compat <= 1e-10);
      PropagatorConfig gc = pc;
      gc.references.clear();
      gc.snapshot_stride = 0;
      const GaugeReport g = gauge_equivalence_check(s, gc);
      m.results["gauge_fidelity"] = g.fidelity;
      m.results["global_phase"] = g.global_phase;
      add_check(m, "gauge_fidelity", 1.0 - g.fidelity, c.fidelity_tol,
                1.0 - g.fidelity <= c.fidelity_tol);
    }
    if (s.name == "cylinder") {
      const double t = 0.5 * (s.t_start + s.t_end);
      const auto [fixed, moving] = cylinder_flux_coefficients(s, t);
      const double expected = -0.5 * s.family.velocity(t, Vec::Ones(1))(0);
      const double err = std::abs(fixed) + std::abs(moving - Complex(0.0, expected));
      m.results["flux_fixed_end"] = {fixed.real(), fixed.imag()};
      m.results["flux_moving_end"] = {moving.real(), moving.imag()};
      add_check(m, "cylinder_flux", err, 1e-12, err <= 1e-12);
    }
  }
  return m;
}

RunManifest run_adiabatic(const RunConfig& c) {
  c.validate();
  RunManifest m;
  m.config = c.to_json();
  ScenarioParameters p = c.params;
  p.cells = resolved_cells(c);
  p.t_end = 1.0;
  p.smooth = true;
  const ScenarioDef s = build_scenario(c.scenario, p);
  if (!is_hermitian(s.bc)) throw ConfigInvalid("adiabatic runs need a Hermitian boundary condition");
  const fs::path dir = prepare_output(c);

  AdiabaticConfig ac;
  ac.epsilons = c.epsilons;
  ac.dt = c.dt;
  ac.solver_tol = c.solver_tol;
  const AdiabaticRun run = adiabatic_experiment(s.family, s.coeffs, s.grid, s.bc, ac);

  std::string csv = "epsilon,overlap,deviation,final_norm,steps\n";
  for (std::size_t i = 0; i < run.epsilons.size(); ++i) {
    csv += num(run.epsilons[i]) + ',' + num(run.final_overlaps[i]) + ',' +
           num(run.deviation(i)) + ',' + num(run.final_norms[i]) + ',' +
           std::to_string(run.steps[i]) + '\n';
  }
  write_text(dir / "adiabatic.csv", csv);
  m.files.push_back("adiabatic.csv");
  m.results["initial_overlap"] = run.initial_overlap;
  m.results["overlaps"] = run.final_overlaps;
  m.results["branch_eigenvalues"] = run.sample_eigenvalues;
  m.results["branch_gaps"] = run.sample_gaps;

  const double last = run.final_overlaps.back();
  add_check(m, "final_overlap", last, c.overlap_target, last >= c.overlap_target);
  if (run.epsilons.size() > 1) {
    const double small = run.deviation(run.epsilons.size() - 1), large = run.deviation(0);
    add_check(m, "deviation_trend", small, large, small <= large);
  }
  return m;
}

RunManifest run_moser(const RunConfig& c) {
  c.validate();
  RunManifest m;
  m.config = c.to_json();
  const int cells = c.params.cells > 0 ? c.params.cells : 64;
  const GridPtr grid = ReferenceGrid::unit(c.dimension, cells);
  const double a = c.amplitude;
  std::function<double(const Vec&)> raw;
  if (c.density == "uniform") {
    raw = [](const Vec&) { return 1.0; };
  } else if (c.density == "sine") {
    raw = [a](const Vec& y) {
      double p = 1.0;
      for (int k = 0; k < y.size(); ++k) p *= std::sin(2.0 * kPi * y(k));
      return 1.0 + a * p;
    };
  } else {
    raw = [a](const Vec& y) {
      const double r2 = (y.array() - 0.5).square().sum();
      return 1.0 + a * std::exp(-r2 / (2.0 * 0.1 * 0.1));
    };
  }
  for (Index i = 0; i < grid->node_count(); ++i) {
    if (!(raw(grid->node(i)) > 0.0)) {
      throw ConfigInvalid("density is not positive everywhere on the grid");
    }
  }
  for (Index q = 0; q < grid->quadrature_count(); ++q) {
    if (!(raw(grid->quadrature_point(q)) > 0.0)) {
      throw ConfigInvalid("density is not positive everywhere on the grid");
    }
  }
  const fs::path dir = prepare_output(c);
  const DensityFamily f = DensityFamily::stationary(raw, true);
  const RVector cells_f = f.cell_averages(*grid, 0.0);
  const bool contractive = (cells_f.array() - 1.0).abs().maxCoeff() <= 0.1;
  const MoserMap map = contractive ? moser_fixed_point(f, grid, 0.0)
                                   : moser_combined(f, grid, {0.0}).front();

  std::string csv = c.dimension == 1 ? "y,phi\n" : "y1,y2,phi1,phi2\n";
  for (Index i = 0; i < grid->node_count(); ++i) {
    const Vec y = grid->node(i);
    for (int k = 0; k < c.dimension; ++k) csv += num(y(k)) + ',';
    for (int k = 0; k < c.dimension; ++k) {
      csv += num(map.forward[i](k)) + (k + 1 < c.dimension ? "," : "\n");
    }
  }
  write_text(dir / "phi.csv", csv);
  m.files.push_back("phi.csv");
  json report = {{"method", map.method},
                 {"residual", map.residual},
                 {"raw_residual", map.raw_residual},
                 {"iterations", map.iterations},
                 {"increments", map.increments},
                 {"min_det", map.det.minCoeff()},
                 {"max_det", map.det.maxCoeff()}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  m.files.push_back("report.json");
  m.results = report;
  add_check(m, "det_residual", map.residual, c.moser_tol, map.residual <= c.moser_tol);
  return m;
}

RunManifest convergence_report(const RunConfig& c) {
  c.validate();
  RunManifest m;
  m.config = c.to_json();
  std::vector<double> h, err;
  std::string csv;
  if (c.ladder == "time") {
    if (c.dt_ladder.size() < 2) throw ConfigInvalid("the time ladder needs at least two steps");
    const ScenarioDef s = make_scenario(c);
    const GridFunction v0 = s.initial_state();
    PropagatorConfig pc;
    pc.t_start = s.t_start;
    pc.t_end = s.t_end;
    pc.solver_tol = c.solver_tol;
    pc.dt = *std::min_element(c.dt_ladder.begin(), c.dt_ladder.end()) / 4.0;
    const GridFunction ref = evolve(s.assembler(), v0, pc).final_state;
    csv = "dt,error\n";
    for (double dt : c.dt_ladder) {
      pc.dt = dt;
      const double e = distance(evolve(s.assembler(), v0, pc).final_state, ref);
      h.push_back(dt);
      err.push_back(e);
      csv += num(dt) + ',' + num(e) + '\n';
    }
  } else {
    if (c.grid_ladder.size() < 2) throw ConfigInvalid("the grid ladder needs at least two grids");
    const int finest = *std::max_element(c.grid_ladder.begin(), c.grid_ladder.end());
    auto eigenvalue = [&c](int cells) {
      RunConfig cc = c;
      cc.params.cells = cells;
      const ScenarioDef s = make_scenario(cc);
      const int index = s.bc == BoundaryCondition::Dirichlet ? 0 : 1;
      const DiscreteHamiltonian H = assemble_hamiltonian(
          s.family.frozen(s.t_start), s.grid, s.coeffs, s.t_start, s.bc);
      return lowest_eigenpairs(H.matrix, index + 1).values(index);
    };
    const double ref = eigenvalue(4 * finest);
    csv = "cells,eigenvalue,error\n";
    for (int n : c.grid_ladder) {
      const double lam = eigenvalue(n);
      h.push_back(1.0 / n);
      err.push_back(std::abs(lam - ref));
      csv += std::to_string(n) + ',' + num(lam) + ',' + num(err.back()) + '\n';
    }
  }
  const double order = fitted_order(h, err);
  const fs::path dir = prepare_output(c);
  write_text(dir / "convergence.csv", csv);
  m.files.push_back("convergence.csv");
  json report = {{"ladder", c.ladder}, {"h", h}, {"errors", err}, {"order", order}};
  write_text(dir / "report.json", report.dump(2) + "\n");
  m.files.push_back("report.json");
  m.results = report;
  add_check(m, "order", order, c.order_tol,
            std::abs(order - c.order_target) <= c.order_tol);
  return m;
}

int execute(const RunConfig& config) {
  RunManifest m;
  try {
    if (config.command == "run") {
      m = run_scenario(config);
    } else if (config.command == "adiabatic") {
      m = run_adiabatic(config);
    } else if (config.command == "moser") {
      m = run_moser(config);
    } else if (config.command == "converge") {
      m = convergence_report(config);
    } else {
      throw ConfigInvalid("unknown command '" + config.command + "'");
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::error_code ec;
    if (fs::is_directory(config.output, ec)) {
      json j = {{"version", kVersion}, {"config", config.to_json()}, {"error", e.what()}};
      write_text(fs::path(config.output) / "manifest.json", j.dump(2) + "\n");
    }
    return kRuntimeError;
  }
  m.files.push_back("manifest.json");
  write_text(fs::path(config.output) / "manifest.json", m.to_json().dump(2) + "\n");
  for (const Check& ch : m.checks) {
    std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << " value=" << num(ch.value)
              << " threshold=" << num(ch.threshold) << "\n";
  }
  return m.passed() ? kOk : kInvariantFailure;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Schroedinger evolution on moving domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, scenario, bc, output, density, ladder, ramp;
  int grid = 0, stride = 0, dimension = 2;
  double dt = 0, l0 = 0, l1 = 0, omega = 0, accel = 0, t_end = 0, amplitude = 0, solver_tol = 0;
  std::uint64_t seed = 0;
  bool self_test = false;
  std::vector<double> epsilons, dt_ladder;
  std::vector<int> grid_ladder;

  std::vector<CLI::Option*> opts;
  auto add = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--scenario", scenario, "scenario name (see `list`)");
    sub->add_option("--grid", grid, "cells per axis");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--bc", bc, "dirichlet | magnetic-neumann | naive-neumann");
    sub->add_option("--epsilon", epsilons, "decreasing slowness list")->delimiter(',');
    sub->add_option("--output", output, "output directory");
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_flag("--self-test", self_test, "run the scenario self tests");
    sub->add_option("--l0", l0, "initial length");
    sub->add_option("--l1", l1, "final length");
    sub->add_option("--ramp", ramp, "smooth | linear length growth");
    sub->add_option("--omega", omega, "angular speed");
    sub->add_option("--accel", accel, "translation acceleration");
    sub->add_option("--t-end", t_end, "final time");
    sub->add_option("--stride", stride, "snapshot stride (0: none)");
    sub->add_option("--solver-tol", solver_tol, "linear solver tolerance");
    sub->add_option("--density", density, "uniform | sine | bump");
    sub->add_option("--amplitude", amplitude, "density amplitude");
    sub->add_option("--dim", dimension, "dimension for moser");
    sub->add_option("--ladder", ladder, "time | space");
    sub->add_option("--dt-ladder", dt_ladder, "time steps")->delimiter(',');
    sub->add_option("--grid-ladder", grid_ladder, "grid sizes")->delimiter(',');
  };
  CLI::App* run = app.add_subcommand("run", "evolve a scenario");
  CLI::App* adiabatic = app.add_subcommand("adiabatic", "sweep the slowness parameter");
  CLI::App* moser = app.add_subcommand("moser", "prescribed Jacobian construction");
  CLI::App* converge = app.add_subcommand("converge", "refinement ladder and order fit");
  CLI::App* list = app.add_subcommand("list", "list scenarios");
  for (CLI::App* sub : {run, adiabatic, moser, converge}) add(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (list->parsed()) {
    std::cout << "scenarios:";
    for (const std::string& n : scenario_names()) std::cout << " " << n;
    std::cout << "\ncommands: run adiabatic moser converge list\n";
    return kOk;
  }
  CLI::App* sub = app.get_subcommands().front();

  RunConfig c;
  c.command = sub->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigInvalid("cannot read configuration '" + config_path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("malformed configuration: ") + e.what());
      }
      apply_json(c, doc);
      c.command = sub->get_name();
    }
    auto given = [sub](const char* name) { return sub->get_option(name)->count() > 0; };
    if (given("--scenario")) c.scenario = scenario;
    if (given("--grid")) c.params.cells = grid;
    if (given("--dt")) c.dt = dt;
    if (given("--bc")) c.params.bc = parse_boundary_condition(bc);
    if (given("--epsilon")) c.epsilons = epsilons;
    if (given("--output")) c.output = output;
    if (given("--seed")) c.seed = seed;
    if (given("--self-test")) c.self_test = self_test;
    if (given("--l0")) c.params.l0 = l0;
    if (given("--l1")) c.params.l1 = l1;
    if (given("--ramp")) {
      if (ramp != "smooth" && ramp != "linear") throw ConfigInvalid("--ramp must be smooth or linear");
      c.params.smooth = ramp == "smooth";
    }
    if (given("--omega")) c.params.omega = omega;
    if (given("--accel")) c.params.accel = accel;
    if (given("--t-end")) c.params.t_end = t_end;
    if (given("--stride")) c.snapshot_stride = stride;
    if (given("--solver-tol")) c.solver_tol = solver_tol;
    if (given("--density")) c.density = density;
    if (given("--amplitude")) c.amplitude = amplitude;
    if (given("--dim")) c.dimension = dimension;
    if (given("--ladder")) c.ladder = ladder;
    if (given("--dt-ladder")) c.dt_ladder = dt_ladder;
    if (given("--grid-ladder")) c.grid_ladder = grid_ladder;
    c.validate();
  } catch (const ConfigInvalid& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  }
  return execute(c);
}

}  // namespace movdom::cli
