#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "movdom/propagator.hpp"

namespace movdom {

/// Scalar phase phi(t, x) on the moving domain with h_* dh/dt = 2 grad phi.
struct GaugeSpec {
  std::function<double(double, const Vec&)> phase;
  std::function<Vec(double, const Vec&)> gradient;
  std::function<double(double, const Vec&)> rate;

  static GaugeSpec zero(int dimension);
};

/// max over the nodes of |dh/dt(t, y) - 2 grad phi(t, h(t, y))|.
double gauge_compatibility_residual(const GaugeSpec& gauge,
                                    const DiffeoFamily& family, double t,
                                    const GridPtr& grid);
/// Same at random points of the reference box and random times in [t0, t1].
double gauge_compatibility_residual_random(const GaugeSpec& gauge,
                                           const DiffeoFamily& family,
                                           const GridPtr& grid, double t0,
                                           double t1, int samples,
                                           std::uint64_t seed);

/// w(y) = exp(-i phi(t, h(t, y))) v(y). Throws GaugeIncompatible if the
/// compatibility residual exceeds 1e-10 max(1, |dh/dt|).
GridFunction apply_gauge(const GridFunction& v, const GaugeSpec& gauge,
                         const DiffeoFamily& family, double t);

/// Gauge-simplified equation, possibly in its own time variable s.
struct ReducedModel {
  std::string description;
  Assembler assemble;                        // in model time s
  std::function<double(double)> model_time;  // physical t -> s
  std::function<double(double)> global_phase;  // stripped phase at t
};

struct ScenarioDef {
  std::string name;
  DiffeoFamily family;
  CoefficientSet coeffs;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  GridPtr grid;
  double t_start = 0.0;
  double t_end = 1.0;
  int eigen_index = 0;                  // initial eigenstate of the frozen operator
  std::optional<GridFunction> samples;  // explicit initial state instead
  std::vector<std::string> observables;
  std::optional<GaugeSpec> gauge;
  std::optional<ReducedModel> reduced;

  Assembler assembler() const;
  DiscreteHamiltonian hamiltonian(double t) const;
  /// Explicit samples, or the chosen eigenstate of the motionless operator
  /// h(t_start) at t_start.
  GridFunction initial_state() const;
};

struct ScenarioOptions {
  int cells = 200;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double t_start = 0.0;
  double t_end = 1.0;
  int eigen_index = 0;
};

/// Unit interval, no motion.
ScenarioDef static_scenario(const ScenarioOptions& options = {});
/// h = y + D(t) on the unit interval or square; reduced equation
/// -Delta + 1/2 <D'', y> with the global phase 1/2 <D', D> - 1/4 int |D'|^2.
ScenarioDef translation_scenario(std::vector<ScalarPath> D,
                                 const ScenarioOptions& options = {});
/// Rotation by omega t of the square (-1/2, 1/2)^2.
ScenarioDef rotation_scenario(double omega, const ScenarioOptions& options = {});
/// h = f(t) y with the reduced equation in tau = int 1/f^2.
ScenarioDef homothety_scenario(const ScalarPath& f,
                               const ScenarioOptions& options = {},
                               int dimension = 1);
/// Axial reduction of a stretching cylinder: (0, l(t)) with magnetic Neumann
/// conditions.
ScenarioDef cylinder_scenario(const ScalarPath& ell,
                              const ScenarioOptions& options = {});
/// h = l(t) y on the unit interval with the configured boundary condition.
ScenarioDef moving_interval_scenario(const ScalarPath& ell,
                                     const ScenarioOptions& options = {});

/// tau(t) = int_{t0}^t f^{-2} and its inverse.
struct Reparametrization {
  std::function<double(double)> tau;
  std::function<double(double)> time;
};
Reparametrization homothety_reparametrization(const ScalarPath& f, double t0);

/// Three assemblies of the rotating square at time t (Dirichlet).
struct RotationAssemblies {
  SparseC transport;  // -Delta + i omega <y_perp, grad>
  SparseC magnetic;   // -(grad - i omega/2 y_perp)^2 - omega^2 |y|^2 / 4
  SparseC general;    // generic moving-domain assembly
  double transport_vs_magnetic = 0.0;  // relative to max |magnetic|
  double general_vs_magnetic = 0.0;
};
RotationAssemblies rotation_assemblies(double omega, int cells, double t = 0.0);

/// Boundary coefficients (fixed end, moving end) of the cylinder scenario.
std::pair<Complex, Complex> cylinder_flux_coefficients(const ScenarioDef& cylinder,
                                                       double t);

struct GaugeReport {
  double fidelity = 0.0;
  double global_phase = 0.0;
  EvolutionTrace full;
  EvolutionTrace reduced;
};
/// Evolves the full formulation and the reduced equation from gauge-related
/// data and compares the gauged full state with the reduced one.
GaugeReport gauge_equivalence_check(const ScenarioDef& scenario,
                                    const PropagatorConfig& config);

/// Registry used by the command line.
struct ScenarioParameters {
  int cells = 200;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double t_end = 1.0;
  double l0 = 1.0;     // interval and cylinder lengths
  double l1 = 1.5;
  bool smooth = false; // smooth ramp instead of linear growth
  double omega = 1.0;
  double accel = 1.0;  // translation D(t) = accel t^2 / 2
  double f_rate = 0.5; // homothety f = 1 + f_rate t + f_curv t^2
  double f_curv = 0.0;
};
std::vector<std::string> scenario_names();
/// Throws ConfigInvalid for unknown names.
ScenarioDef build_scenario(const std::string& name, const ScenarioParameters& p);

}  // namespace movdom
