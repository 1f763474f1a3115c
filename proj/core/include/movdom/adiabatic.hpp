#pragma once

#include <vector>

#include "movdom/propagator.hpp"
#include "movdom/spectrum.hpp"

namespace movdom {

struct AdiabaticConfig {
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.02, 0.01};  // strictly decreasing
  int branch = 0;
  double dt = 1e-3;  // physical time step
  double solver_tol = 1e-12;
  double gap_floor = 1e-6;
  int branch_samples = 11;  // tau values where simplicity is checked
  bool parallel = true;
};

struct AdiabaticRun {
  std::vector<double> epsilons;
  std::vector<double> final_overlaps;  // <P(1) u_eps(1/eps), u_eps(1/eps)>
  std::vector<double> final_norms;
  std::vector<Index> steps;
  double initial_overlap = 0.0;
  int branch = 0;
  std::vector<double> sample_taus;
  std::vector<double> sample_eigenvalues;
  std::vector<double> sample_gaps;

  double deviation(std::size_t i) const;
};

/// The family is parametrized by tau in [0, 1]. For each eps the state
/// starting on the branch is evolved under the full moving-domain
/// Hamiltonian of t -> h(eps t) over [0, 1/eps]. Throws DegenerateBranch if
/// the branch is not simple or swaps between sampled tau.
AdiabaticRun adiabatic_experiment(const DiffeoFamily& family_tau,
                                  const CoefficientSet& coeffs,
                                  const GridPtr& grid, BoundaryCondition bc,
                                  const AdiabaticConfig& config);

}  // namespace movdom
