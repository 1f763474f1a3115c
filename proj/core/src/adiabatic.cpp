#include "movdom/adiabatic.hpp"

#include <cmath>
#include <future>

#include "movdom/errors.hpp"

namespace movdom {

double AdiabaticRun::deviation(std::size_t i) const {
  return std::abs(final_overlaps.at(i) - initial_overlap);
}

namespace {

CoefficientSet rescale_coefficients(const CoefficientSet& c, double eps) {
  CoefficientSet r = c;
  if (c.diffusion) {
    r.diffusion = [d = c.diffusion, eps](double t, const Vec& x) { return d(eps * t, x); };
  }
  if (c.magnetic) {
    r.magnetic = [a = c.magnetic, eps](double t, const Vec& x) { return a(eps * t, x); };
  }
  if (c.electric) {
    r.electric = [v = c.electric, eps](double t, const Vec& x) { return v(eps * t, x); };
  }
  return r;
}

SpectralProjector frozen_projector(const DiffeoFamily& family,
                                   const CoefficientSet& coeffs,
                                   const GridPtr& grid, BoundaryCondition bc,
                                   double tau, const AdiabaticConfig& config) {
  const DiscreteHamiltonian H =
      assemble_hamiltonian(family.frozen(tau), grid, coeffs, tau, bc);
  return spectral_projector(H, config.branch, config.gap_floor);
}

}  // namespace

AdiabaticRun adiabatic_experiment(const DiffeoFamily& family_tau,
                                  const CoefficientSet& coeffs,
                                  const GridPtr& grid, BoundaryCondition bc,
                                  const AdiabaticConfig& config) {
  if (config.epsilons.empty()) throw InvalidArgument("empty epsilon list");
  for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
    if (!(config.epsilons[i] > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (i > 0 && !(config.epsilons[i] < config.epsilons[i - 1])) {
      throw InvalidArgument("epsilon list must be strictly decreasing");
    }
  }
  if (!is_hermitian(bc)) throw InvalidArgument("adiabatic runs need a Hermitian realization");

  AdiabaticRun run;
  run.branch = config.branch;
  run.epsilons = config.epsilons;

  // Simplicity of the branch and continuity of the eigenvectors along tau.
  const int samples = std::max(2, config.branch_samples);
  CVector previous;
  SpectralProjector P0, P1;
  for (int s = 0; s < samples; ++s) {
    const double tau = static_cast<double>(s) / (samples - 1);
    const SpectralProjector P = frozen_projector(family_tau, coeffs, grid, bc, tau, config);
    if (s > 0 && std::abs(previous.dot(P.eigenvector)) < 0.5) {
      throw DegenerateBranch(tau, P.gap);
    }
    previous = P.eigenvector;
    run.sample_taus.push_back(tau);
    run.sample_eigenvalues.push_back(P.eigenvalue);
    run.sample_gaps.push_back(P.gap);
    if (s == 0) P0 = P;
    if (s == samples - 1) P1 = P;
  }

  const DiscreteHamiltonian layout = empty_hamiltonian(grid, bc);
  const GridFunction u0 = layout.from_dofs(P0.eigenvector);
  run.initial_overlap = P0.overlap(P0.eigenvector);

  auto member = [&](double eps) {
    const DiffeoFamily fam = family_tau.time_rescaled(eps);
    const CoefficientSet c = rescale_coefficients(coeffs, eps);
    PropagatorConfig pc;
    pc.dt = config.dt;
    pc.t_start = 0.0;
    pc.t_end = 1.0 / eps;
    pc.solver_tol = config.solver_tol;
    const EvolutionTrace trace = evolve(fam, c, bc, u0, pc);
    const CVector z = layout.to_dofs(trace.final_state);
    return std::make_tuple(P1.overlap(z), z.norm(), pc.step_count());
  };

  std::vector<std::tuple<double, double, Index>> results;
  if (config.parallel) {
    std::vector<std::future<std::tuple<double, double, Index>>> jobs;
    for (double eps : config.epsilons) {
      jobs.push_back(std::async(std::launch::async, member, eps));
    }
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (double eps : config.epsilons) results.push_back(member(eps));
  }
  for (const auto& [overlap, n, steps] : results) {
    run.final_overlaps.push_back(overlap);
    run.final_norms.push_back(n);
    run.steps.push_back(steps);
  }
  return run;
}

}  // namespace movdom
