#include "movdom/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "movdom/errors.hpp"

namespace movdom {

void PropagatorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument("time step must be positive");
  }
  if (!(t_end >= t_start)) throw InvalidArgument("time span is reversed");
  if (!(solver_tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (snapshot_stride < 0) throw InvalidArgument("snapshot stride must be >= 0");
}

Index PropagatorConfig::step_count() const {
  const double span = t_end - t_start;
  if (span <= 0.0) return 0;
  return static_cast<Index>(std::ceil(span / dt - 1e-9));
}

double EvolutionTrace::max_norm_drift() const {
  double m = 0.0;
  for (double n : norms) m = std::max(m, std::abs(n - norms.front()));
  return m;
}

const Snapshot& EvolutionTrace::snapshot_at(double t) const {
  for (const Snapshot& s : snapshots) {
    if (std::abs(s.time - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
  }
  throw SnapshotMissing("no snapshot at t = " + std::to_string(t));
}

namespace {

bool is_tridiagonal(const SparseC& A) {
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseC::InnerIterator it(A, c); it; ++it) {
      if (std::abs(it.row() - it.col()) > 1) return false;
    }
  }
  return true;
}

CVector thomas(const SparseC& A, const CVector& b) {
  const Index n = A.rows();
  CVector lower = CVector::Zero(n), diag = CVector::Zero(n), upper = CVector::Zero(n);
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseC::InnerIterator it(A, c); it; ++it) {
      if (it.row() == it.col()) {
        diag(it.row()) = it.value();
      } else if (it.row() == it.col() + 1) {
        lower(it.row()) = it.value();
      } else {
        upper(it.row()) = it.value();
      }
    }
  }
  CVector cp(n), dp(n);
  cp(0) = upper(0) / diag(0);
  dp(0) = b(0) / diag(0);
  for (Index i = 1; i < n; ++i) {
    const Complex m = diag(i) - lower(i) * cp(i - 1);
    cp(i) = upper(i) / m;
    dp(i) = (b(i) - lower(i) * dp(i - 1)) / m;
  }
  CVector x(n);
  x(n - 1) = dp(n - 1);
  for (Index i = n - 2; i >= 0; --i) x(i) = dp(i) - cp(i) * x(i + 1);
  return x;
}

CVector sparse_lu(const SparseC& A, const CVector& b) {
  Eigen::SparseLU<SparseC> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw SolverDivergence("sparse LU factorization failed");
  }
  return lu.solve(b);
}

}  // namespace

CVector cayley_step(const SparseC& H, const CVector& z, double dt,
                    double solver_tol) {
  if (H.rows() != z.size()) throw InvalidArgument("state and Hamiltonian sizes differ");
  if (z.size() == 0) return z;
  const Complex half(0.0, 0.5 * dt);
  SparseC A = half * H;
  for (Index i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += 1.0;
  const CVector b = z - half * (H * z);
  const double bnorm = std::max(b.norm(), 1e-300);

  if (is_tridiagonal(A)) {
    CVector x = thomas(A, b);
    if ((A * x - b).norm() <= 10.0 * solver_tol * bnorm && x.allFinite()) return x;
    return sparse_lu(A, b);
  }
  Eigen::BiCGSTAB<SparseC, Eigen::IncompleteLUT<Complex>> solver;
  solver.preconditioner().setDroptol(1e-6);
  solver.setTolerance(solver_tol);
  solver.setMaxIterations(1000);
  solver.compute(A);
  CVector x = solver.solveWithGuess(b, z);
  if (solver.info() != Eigen::Success || (A * x - b).norm() > 10.0 * solver_tol * bnorm) {
    throw SolverDivergence("BiCGSTAB did not reach tolerance (residual " +
                           std::to_string(solver.error()) + ")");
  }
  return x;
}

GridFunction step(const GridFunction& v, const DiscreteHamiltonian& H_mid,
                  double dt, double solver_tol) {
  return H_mid.from_dofs(cayley_step(H_mid.matrix, H_mid.to_dofs(v), dt, solver_tol));
}

EvolutionTrace evolve_on_grid(const Assembler& assemble, const GridFunction& v0,
                              const std::vector<double>& times,
                              const PropagatorConfig& config) {
  if (times.empty()) throw InvalidArgument("empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InvalidArgument("time grid must increase");
  }
  DiscreteHamiltonian H = assemble(times.front());
  CVector z = H.to_dofs(v0);
  std::vector<CVector> refs;
  for (const GridFunction& r : config.references) refs.push_back(H.to_dofs(r));

  EvolutionTrace trace;
  auto record = [&](Index k, double t) {
    trace.times.push_back(t);
    trace.norms.push_back(z.norm());
    trace.energies.push_back(energy_of_dofs(H, z));
    std::vector<double> ov;
    ov.reserve(refs.size());
    for (const CVector& r : refs) ov.push_back(std::norm(r.dot(z)));
    trace.overlaps.push_back(std::move(ov));
    const bool last = k + 1 == static_cast<Index>(times.size());
    if (config.snapshot_stride > 0 && (k % config.snapshot_stride == 0 || last)) {
      trace.snapshots.push_back({k, t, H.from_dofs(z)});
    }
  };
  record(0, times.front());
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    H = assemble(times[k - 1] + 0.5 * dt);
    z = cayley_step(H.matrix, z, dt, config.solver_tol);
    record(static_cast<Index>(k), times[k]);
  }
  trace.final_state = H.from_dofs(z);
  return trace;
}

EvolutionTrace evolve(const Assembler& assemble, const GridFunction& v0,
                      const PropagatorConfig& config) {
  config.validate();
  const Index n = config.step_count();
  std::vector<double> times(static_cast<std::size_t>(n + 1));
  for (Index k = 0; k <= n; ++k) times[k] = config.t_start + static_cast<double>(k) * config.dt;
  times.back() = n > 0 ? config.t_end : config.t_start;
  EvolutionTrace trace = evolve_on_grid(assemble, v0, times, config);
  trace.metadata["dt"] = std::to_string(config.dt);
  trace.metadata["steps"] = std::to_string(n);
  return trace;
}

EvolutionTrace evolve(const DiffeoFamily& family, const CoefficientSet& coeffs,
                      BoundaryCondition bc, const GridFunction& v0,
                      const PropagatorConfig& config) {
  const GridPtr grid = v0.grid();
  Assembler assemble = [&family, &coeffs, grid, bc](double t) {
    return assemble_hamiltonian(family, grid, coeffs, t, bc);
  };
  EvolutionTrace trace = evolve(assemble, v0, config);
  trace.metadata["family"] = family.name();
  trace.metadata["bc"] = to_string(bc);
  return trace;
}

ScalarField transport_solution(const EvolutionTrace& trace,
                               const DiffeoFamily& family, double t) {
  return pushforward_sharp(family, t, trace.snapshot_at(t).v);
}

NeumannDrift neumann_drift_diagnostic(const DiffeoFamily& family,
                                      const CoefficientSet& coeffs,
                                      const GridFunction& v0,
                                      const PropagatorConfig& config) {
  NeumannDrift out;
  out.naive = evolve(family, coeffs, BoundaryCondition::NaiveNeumann, v0, config);
  out.magnetic = evolve(family, coeffs, BoundaryCondition::MagneticNeumann, v0, config);
  return out;
}

}  // namespace movdom
