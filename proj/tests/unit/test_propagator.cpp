#include <cmath>

#include <gtest/gtest.h>

#include "movdom/errors.hpp"
#include "movdom/propagator.hpp"
#include "movdom/spectrum.hpp"

using namespace movdom;

TEST(Propagator, ConfigValidation) {
  PropagatorConfig c;
  c.dt = 0.3;
  c.t_end = 1.0;
  EXPECT_EQ(c.step_count(), 4);
  c.dt = 0.25;
  EXPECT_EQ(c.step_count(), 4);
  c.dt = -1.0;
  EXPECT_ANY_THROW(c.validate());
  c.dt = 0.1;
  c.t_end = -1.0;
  EXPECT_ANY_THROW(c.validate());
}

TEST(Propagator, CayleyStepIsUnitary) {
  const GridPtr g = ReferenceGrid::unit(2, 10);
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::rotation(1.0), g, CoefficientSet::free(2), 0.2, BoundaryCondition::Dirichlet);
  CVector z = CVector::Random(H.size());
  z.normalize();
  const CVector w = cayley_step(H.matrix, z, 0.05);
  EXPECT_NEAR(w.norm(), 1.0, 1e-12);
}

TEST(Propagator, TridiagonalAndIterativePathsAgree) {
  const GridPtr g = ReferenceGrid::unit(1, 50);
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::homothety(ScalarPath::linear(1.0, 0.5), 1), g, CoefficientSet::free(1), 0.3,
      BoundaryCondition::Dirichlet);
  CVector z = CVector::Random(H.size());
  const CVector a = cayley_step(H.matrix, z, 1e-2);
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(H.matrix);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(H.size(), H.size());
  const Complex half(0.0, 0.5e-2);
  const CVector b = (I + half * dense).partialPivLu().solve((I - half * dense) * z);
  EXPECT_LT((a - b).norm(), 1e-12 * b.norm());
}

TEST(Propagator, StationaryEigenstateRotatesWithCayleyPhase) {
  const GridPtr g = ReferenceGrid::unit(1, 100);
  const DiffeoFamily id = DiffeoFamily::identity(1);
  const CoefficientSet c = CoefficientSet::free(1);
  const DiscreteHamiltonian H = assemble_hamiltonian(id, g, c, 0.0, BoundaryCondition::Dirichlet);
  const Eigenpairs e = lowest_eigenpairs(H.matrix, 1);
  const GridFunction v0 = H.from_dofs(e.vectors.col(0));
  PropagatorConfig pc;
  pc.dt = 1e-2;
  pc.t_end = 0.5;
  pc.references = {v0};
  const EvolutionTrace trace = evolve(id, c, BoundaryCondition::Dirichlet, v0, pc);
  const double lam = e.values(0);
  const Complex factor =
      std::pow((1.0 - Complex(0, 0.5 * pc.dt * lam)) / (1.0 + Complex(0, 0.5 * pc.dt * lam)), 50);
  const CVector expected = factor * e.vectors.col(0);
  EXPECT_LT((H.to_dofs(trace.final_state) - expected).norm(), 1e-10);
  for (const auto& row : trace.overlaps) EXPECT_NEAR(row[0], 1.0, 1e-10);
  for (double en : trace.energies) EXPECT_NEAR(en, lam, 1e-8);
}

TEST(Propagator, NormConservedOnMovingInterval) {
  const GridPtr g = ReferenceGrid::unit(1, 100);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::linear(1.0, 0.5), 1);
  const GridFunction v0 =
      GridFunction::nodal(g, [](const Vec& y) { return Complex(std::sin(kPi * y(0)), 0.0); });
  PropagatorConfig pc;
  pc.dt = 1e-2;
  pc.snapshot_stride = 10;
  const EvolutionTrace trace =
      evolve(h, CoefficientSet::free(1), BoundaryCondition::Dirichlet, v0, pc);
  EXPECT_LE(trace.max_norm_drift(), 1e-12);
  EXPECT_EQ(trace.records(), 101);
  EXPECT_NO_THROW(trace.snapshot_at(0.5));
  EXPECT_THROW(trace.snapshot_at(0.55), SnapshotMissing);
  EXPECT_EQ(trace.metadata.at("steps"), "100");
}

TEST(Propagator, NaiveNeumannDriftTracksLength) {
  const GridPtr g = ReferenceGrid::unit(1, 100);
  const ScalarPath ell = ScalarPath::linear(1.0, 0.5);
  const GridFunction one = GridFunction::nodal(g, [](const Vec&) { return Complex(1.0); });
  PropagatorConfig pc;
  pc.dt = 1e-2;
  const NeumannDrift d = neumann_drift_diagnostic(DiffeoFamily::homothety(ell, 1),
                                                  CoefficientSet::free(1), one, pc);
  for (Index k = 0; k < d.naive.records(); ++k) {
    const double l = ell(d.naive.times[k]);
    EXPECT_NEAR(d.naive.norms[k] * d.naive.norms[k] / l, 1.0, 1e-2);
  }
  EXPECT_LE(d.magnetic.max_norm_drift(), 1e-8);
}

TEST(Propagator, TransportSolutionOnDomain) {
  const GridPtr g = ReferenceGrid::unit(1, 100);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::constant(2.0), 1);
  const GridFunction v0 = GridFunction::nodal(
      g, [](const Vec& y) { return Complex(std::sqrt(2.0) * std::sin(kPi * y(0))); });
  PropagatorConfig pc;
  pc.dt = 1e-2;
  pc.t_end = 0.1;
  pc.snapshot_stride = 5;
  const EvolutionTrace trace =
      evolve(h, CoefficientSet::free(1), BoundaryCondition::Dirichlet, v0, pc);
  const ScalarField u0 = transport_solution(trace, h, 0.0);
  EXPECT_NEAR(std::abs(u0(Vec::Constant(1, 1.0))), 1.0, 1e-3);
  EXPECT_NEAR(std::abs(transport_solution(trace, h, 0.1)(Vec::Constant(1, 1.0))), 1.0, 1e-3);
}
