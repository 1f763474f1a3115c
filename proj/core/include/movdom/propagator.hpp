#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "movdom/hamiltonian.hpp"

namespace movdom {

struct PropagatorConfig {
  double dt = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  double solver_tol = 1e-12;
  int snapshot_stride = 0;  // 0 keeps only the final state
  /// States whose overlaps |<phi_k, v>|^2 are recorded each step.
  std::vector<GridFunction> references;

  void validate() const;
  /// Number of steps; the last step is shortened to land on t_end.
  Index step_count() const;
};

struct Snapshot {
  Index step = 0;
  double time = 0.0;
  GridFunction v;
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<std::vector<double>> overlaps;  // one row per record
  std::vector<Snapshot> snapshots;
  std::map<std::string, std::string> metadata;
  GridFunction final_state;
  /// Scalar phase stripped from a reduced model, recorded only.
  double global_phase = 0.0;

  Index records() const { return static_cast<Index>(times.size()); }
  double max_norm_drift() const;
  const Snapshot& snapshot_at(double t) const;  // throws SnapshotMissing
};

/// Hamiltonian slice at a time.
using Assembler = std::function<DiscreteHamiltonian(double t)>;

/// One Crank-Nicolson step (I + i dt/2 H) z' = (I - i dt/2 H) z in degree of
/// freedom coordinates.
CVector cayley_step(const SparseC& H, const CVector& z, double dt,
                    double solver_tol = 1e-12);
GridFunction step(const GridFunction& v, const DiscreteHamiltonian& H_mid,
                  double dt, double solver_tol = 1e-12);

/// Marches over [t_start, t_end] with H assembled at each midpoint.
EvolutionTrace evolve(const Assembler& assemble, const GridFunction& v0,
                      const PropagatorConfig& config);
/// Same, on an explicit increasing time grid (config.dt is ignored).
EvolutionTrace evolve_on_grid(const Assembler& assemble, const GridFunction& v0,
                              const std::vector<double>& times,
                              const PropagatorConfig& config);
EvolutionTrace evolve(const DiffeoFamily& family, const CoefficientSet& coeffs,
                      BoundaryCondition bc, const GridFunction& v0,
                      const PropagatorConfig& config);

/// u(t, x) = v(t, h^{-1}(t, x)) / sqrt|J| from the snapshot at time t.
ScalarField transport_solution(const EvolutionTrace& trace,
                               const DiffeoFamily& family, double t);

struct NeumannDrift {
  EvolutionTrace naive;
  EvolutionTrace magnetic;
};
/// Runs the same data with the naive homogeneous Neumann condition and with
/// the magnetic Neumann condition.
NeumannDrift neumann_drift_diagnostic(const DiffeoFamily& family,
                                      const CoefficientSet& coeffs,
                                      const GridFunction& v0,
                                      const PropagatorConfig& config);

}  // namespace movdom
