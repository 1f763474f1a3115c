// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "movdom/adiabatic.hpp"
#include "movdom/calculus.hpp"
#include "movdom/moser.hpp"
#include "movdom/scenarios.hpp"
#include "movdom/spectrum.hpp"

using namespace movdom;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail,
            std::chrono::steady_clock::time_point start) {
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %2d %-26s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

using Clock = std::chrono::steady_clock;

void hermiticity() {
  const auto start = Clock::now();
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (const std::string& name : scenario_names()) {
    for (BoundaryCondition bc :
         {BoundaryCondition::Dirichlet, BoundaryCondition::MagneticNeumann}) {
      ScenarioParameters p;
      p.cells = name == "rotation" ? 24 : 100;
      p.bc = bc;
      const ScenarioDef s = build_scenario(name, p);
      std::uniform_real_distribution<double> time(s.t_start, s.t_end);
      for (int k = 0; k < 20; ++k) {
        worst = std::max(worst, hermiticity_residual(s.hamiltonian(time(rng)).matrix));
      }
    }
  }
  report(1, "hermiticity", worst <= 1e-12, fmt("max |H-H*|/|H| = %.2e", worst), start);
}

void unitarity() {
  const auto start = Clock::now();
  ScenarioOptions o;
  o.cells = 200;
  const ScenarioDef s = moving_interval_scenario(ScalarPath::linear(1.0, 0.5), o);
  PropagatorConfig pc;
  pc.dt = 1e-3;
  const EvolutionTrace trace = evolve(s.assembler(), s.initial_state(), pc);
  const double drift = trace.max_norm_drift();
  report(2, "unitarity", drift <= 1e-10, fmt("norm drift = %.2e", drift), start);
}

void neumann() {
  const auto start = Clock::now();
  const GridPtr g = ReferenceGrid::unit(1, 200);
  const ScalarPath ell = ScalarPath::linear(1.0, 0.5);
  const DiffeoFamily fam = DiffeoFamily::homothety(ell, 1);
  const GridFunction v0 = GridFunction::nodal(g, [](const Vec&) { return Complex(1.0); });
  PropagatorConfig pc;
  pc.dt = 1e-3;
  const NeumannDrift d = neumann_drift_diagnostic(fam, CoefficientSet::free(1), v0, pc);
  double naive = 0.0;
  for (std::size_t k = 0; k < d.naive.times.size(); ++k) {
    const double l = ell(d.naive.times[k]);
    naive = std::max(naive, std::abs(d.naive.norms[k] * d.naive.norms[k] - l) / l);
  }
  const double magnetic = d.magnetic.max_norm_drift();
  report(3, "naive vs magnetic neumann", naive <= 1e-2 && magnetic <= 1e-8,
         fmt("naive rel err %.2e, magnetic drift %.2e", naive, magnetic), start);
}

void spectrum() {
  const auto start = Clock::now();
  const GridPtr g = ReferenceGrid::unit(1, 400);
  const double pi2 = kPi * kPi;
  double worst = 0.0;
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::identity(1), g, CoefficientSet::free(1), 0.0, BoundaryCondition::Dirichlet);
  const Eigenpairs e = lowest_eigenpairs(H.matrix, 3);
  for (int k = 0; k < 3; ++k) {
    const double exact = pi2 * (k + 1) * (k + 1);
    worst = std::max(worst, std::abs(e.values(k) - exact) / exact);
  }
  const DiffeoFamily wide = DiffeoFamily::homothety(ScalarPath::constant(2.0), 1).frozen(0.0);
  const DiscreteHamiltonian H2 = assemble_hamiltonian(
      wide, g, CoefficientSet::free(1), 0.0, BoundaryCondition::Dirichlet);
  const Eigenpairs e2 = lowest_eigenpairs(H2.matrix, 3);
  for (int k = 0; k < 3; ++k) {
    const double exact = pi2 * (k + 1) * (k + 1) / 4.0;
    worst = std::max(worst, std::abs(e2.values(k) - exact) / exact);
  }
  report(4, "spectrum oracle", worst <= 1e-3, fmt("max rel err %.2e", worst), start);
}

void pullback_calculus() {
  const auto start = Clock::now();
  const double ell = 1.7;
  const DiffeoFamily fam = DiffeoFamily::homothety(ScalarPath::constant(ell), 1);
  std::vector<double> errs;
  for (int n : {25, 50, 100, 200}) {
    const GridPtr g = ReferenceGrid::unit(1, n);
    const GridFunction s = GridFunction::nodal(
        g, [](const Vec& y) { return Complex(std::sin(kPi * y(0))); });
    const GridFunction lap = pulled_laplacian(fam, 0.0, s);
    double err = 0.0;
    for (Index i : g->interior_nodes()) {
      const double exact = -std::pow(kPi / ell, 2) * std::sin(kPi * g->node(i)(0));
      err = std::max(err, std::abs(lap(i) - exact));
    }
    errs.push_back(err);
  }
  double order = 1e9;
  for (std::size_t k = 1; k < errs.size(); ++k) {
    order = std::min(order, std::log2(errs[k - 1] / errs[k]));
  }

  DiffeoFamily::Parts p;
  p.dimension = 2;
  p.map = [](double t, const Vec& y) {
    Vec x(2);
    x << y(0) * (1.0 + 0.3 * t * t) + 0.1 * t * y(1) * y(1),
        y(1) + 0.2 * std::sin(t) * y(0) * y(1);
    return x;
  };
  const DiffeoFamily bent(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double trace_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = u(rng);
    Vec y(2);
    y << u(rng), u(rng);
    const double d = 1e-4;
    const double fd = (std::log(bent.jacobian(t + d, y).determinant()) -
                       std::log(bent.jacobian(t - d, y).determinant())) / (2 * d);
    trace_err = std::max(trace_err, std::abs(jacobian_log_derivative(bent, t, y) - fd));
  }
  report(5, "pullback calculus", order >= 1.9 && trace_err <= 1e-6,
         fmt("laplacian order %.3f, trace vs fd %.2e", order, trace_err), start);
}

void moser() {
  const auto start = Clock::now();
  DiffeoFamily::Parts p;
  p.dimension = 2;
  p.name = "bulge";
  p.map = [](double t, const Vec& y) {
    const double b = 0.1 * t * std::sin(kPi * y(0)) * std::sin(kPi * y(1));
    Vec x(2);
    x << y(0) * (1.0 + 0.5 * t) + 0.3 * b, y(1) + 0.2 * b;
    return x;
  };
  const GridPtr g = ReferenceGrid::unit(2, 64);
  const NormalizedDiffeo nd = normalize_diffeo(DiffeoFamily(p), g, {0.0, 0.5, 1.0});
  double rel = 0.0;
  for (double r : nd.relative_residual) rel = std::max(rel, r);

  const DensityFamily f = DensityFamily::stationary(
      [](const Vec& y) {
        return 1.0 + 0.05 * std::sin(2 * kPi * y(0)) * std::sin(2 * kPi * y(1));
      },
      true);
  const MoserMap fp = moser_fixed_point(f, g, 0.0);

  const GridPtr line = ReferenceGrid::unit(1, 200);
  const MoserMap m1 = moser_fixed_point(
      DensityFamily::stationary([](const Vec& y) { return 1.0 + 0.1 * std::sin(2 * kPi * y(0)); }),
      line, 0.0);
  double oracle = 0.0;
  for (Index i = 0; i < line->node_count(); ++i) {
    const double y = line->node(i)(0);
    const double exact = y + 0.1 * (1.0 - std::cos(2 * kPi * y)) / (2 * kPi);
    oracle = std::max(oracle, std::abs(m1.forward[i](0) - exact));
  }
  report(6, "moser residuals", rel <= 1e-3 && fp.iterations <= 30 && oracle <= 1e-6,
         fmt("normalize rel %.2e, fixed point iters %.0f, 1d oracle %.2e", rel,
             fp.iterations, oracle),
         start);
}

void gauge() {
  const auto start = Clock::now();
  ScenarioOptions o;
  o.cells = 200;
  PropagatorConfig pc;
  pc.dt = 1e-3;
  const GaugeReport tr =
      gauge_equivalence_check(translation_scenario({ScalarPath::cubic(0, 0, 0.5, 0)}, o), pc);
  const GaugeReport hr =
      gauge_equivalence_check(homothety_scenario(ScalarPath::cubic(1, 0.5, 0.5, 0), o), pc);
  report(7, "gauge equivalence", tr.fidelity >= 1 - 1e-6 && hr.fidelity >= 1 - 1e-5,
         fmt("1-fidelity translation %.2e, homothety %.2e", 1 - tr.fidelity, 1 - hr.fidelity),
         start);
}

void rotation() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (double t : {0.0, 0.3, 0.9}) {
    worst = std::max(worst, rotation_assemblies(1.0, 64, t).transport_vs_magnetic);
  }
  report(8, "rotation identity", worst <= 1e-12, fmt("transport vs magnetic %.2e", worst),
         start);
}

void adiabatic() {
  const auto start = Clock::now();
  const GridPtr g = ReferenceGrid::unit(1, 200);
  const AdiabaticRun run = adiabatic_experiment(
      DiffeoFamily::homothety(ScalarPath::smooth_ramp(1.0, 1.5), 1), CoefficientSet::free(1),
      g, BoundaryCondition::Dirichlet, AdiabaticConfig{});
  const std::size_t last = run.epsilons.size() - 1;
  const bool pass = run.final_overlaps[last] >= 0.99 && run.deviation(last) <= run.deviation(0);
  report(9, "adiabatic limit", pass,
         fmt("overlap(0.01) %.10f, dev(0.01) %.2e, dev(0.2) %.2e", run.final_overlaps[last],
             run.deviation(last), run.deviation(0)),
         start);
}

void temporal_order() {
  const auto start = Clock::now();
  ScenarioOptions o;
  o.cells = 200;
  const ScenarioDef s = moving_interval_scenario(ScalarPath::smooth_ramp(1.0, 1.5), o);
  const GridFunction v0 = s.initial_state();
  PropagatorConfig pc;
  pc.dt = 5e-4 / 4;
  const GridFunction ref = evolve(s.assembler(), v0, pc).final_state;
  std::vector<double> lh, le;
  for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
    pc.dt = dt;
    GridFunction d = evolve(s.assembler(), v0, pc).final_state;
    d.values() -= ref.values();
    lh.push_back(std::log(dt));
    le.push_back(std::log(norm(d)));
  }
  const double n = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lh.size(); ++k) {
    sx += lh[k];
    sy += le[k];
    sxx += lh[k] * lh[k];
    sxy += lh[k] * le[k];
  }
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report(10, "temporal convergence", std::abs(order - 2.0) <= 0.3,
         fmt("fitted order %.3f", order), start);
}

}  // namespace

int main() {
  hermiticity();
  unitarity();
  neumann();
  spectrum();
  pullback_calculus();
  moser();
  gauge();
  rotation();
  adiabatic();
  temporal_order();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
