#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "movdom/errors.hpp"
#include "movdom/hamiltonian.hpp"
#include "movdom/spectrum.hpp"

using namespace movdom;

namespace {

CoefficientSet magnetic_coefficients() {
  CoefficientSet c = CoefficientSet::free(2);
  c.magnetic = [](double t, const Vec& x) {
    Vec a(2);
    a << -0.5 * x(1) * (1.0 + t), 0.5 * x(0);
    return a;
  };
  c.electric = [](double, const Vec& x) { return x.squaredNorm(); };
  c.diffusion = [](double, const Vec& x) {
    Mat d(2, 2);
    d << 1.0 + 0.1 * x(0), 0.05, 0.05, 1.2;
    return d;
  };
  c.alpha = 0.5;
  return c;
}

}  // namespace

TEST(Coefficients, EllipticityCheck) {
  Mat d(2, 2);
  d << 1.0, 0.0, 0.0, 0.5;
  EXPECT_NO_THROW(check_ellipticity(d, 0.25));
  EXPECT_THROW(check_ellipticity(d, 0.5), EllipticityViolated);
  d(0, 1) = 0.3;
  EXPECT_THROW(check_ellipticity(d, 0.1), EllipticityViolated);
}

TEST(Coefficients, HomothetyMagneticPotential) {
  const GridPtr g = ReferenceGrid::unit(1, 10);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::linear(1.0, 0.5), 1);
  const MagneticPotential m = magnetic_potential(h, 1.0, g);
  for (Index i = 0; i < g->node_count(); ++i) {
    EXPECT_NEAR(m.pulled(i).real(), -0.25 * g->node(i)(0), 1e-9);
  }
  const Vec x = Vec::Constant(1, 0.9);
  EXPECT_NEAR(m.on_domain(x)(0), -0.25 * x(0) / 1.5, 1e-9);
}

TEST(Coefficients, EffectivePotentials) {
  const DiffeoFamily h = DiffeoFamily::translation({ScalarPath::linear(0.0, 2.0)});
  CoefficientSet c = CoefficientSet::free(1);
  c.magnetic = [](double, const Vec&) { return Vec::Constant(1, 0.3); };
  c.electric = [](double, const Vec&) { return 1.0; };
  const EffectiveValues e = effective_at(c, h, 0.2, Vec::Constant(1, 0.5));
  // A_h = -1/2 d/dt h = -1
  EXPECT_NEAR(e.A_h(0), -1.0, 1e-9);
  EXPECT_NEAR(e.A_tilde(0), 0.3 - 1.0, 1e-9);
  EXPECT_NEAR(e.V_tilde, 1.0 - 1.0 - 2.0 * (-1.0) * 0.3, 1e-9);
}

TEST(Hamiltonian, ParseBoundaryConditions) {
  EXPECT_EQ(parse_boundary_condition("dirichlet"), BoundaryCondition::Dirichlet);
  EXPECT_EQ(parse_boundary_condition("magnetic-neumann"), BoundaryCondition::MagneticNeumann);
  EXPECT_EQ(parse_boundary_condition("naive-neumann"), BoundaryCondition::NaiveNeumann);
  EXPECT_EQ(to_string(BoundaryCondition::MagneticNeumann), "magnetic-neumann");
  EXPECT_ANY_THROW(parse_boundary_condition("robin"));
}

TEST(Hamiltonian, HermitianOnGeneralMotion) {
  const GridPtr g = ReferenceGrid::rectangle(-0.5, 0.5, -0.5, 0.5, 12, 12);
  const DiffeoFamily rot = DiffeoFamily::rotation(1.3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (BoundaryCondition bc :
       {BoundaryCondition::Dirichlet, BoundaryCondition::MagneticNeumann}) {
    for (int k = 0; k < 5; ++k) {
      const DiscreteHamiltonian H =
          assemble_hamiltonian(rot, g, magnetic_coefficients(), u(rng), bc);
      EXPECT_LE(hermiticity_residual(H.matrix), 1e-12);
    }
  }
}

TEST(Hamiltonian, NaiveNeumannIsNotHermitianOnMovingDomain) {
  const GridPtr g = ReferenceGrid::unit(1, 20);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::linear(1.0, 0.5), 1);
  const DiscreteHamiltonian H =
      assemble_hamiltonian(h, g, CoefficientSet::free(1), 0.5, BoundaryCondition::NaiveNeumann);
  EXPECT_GT(hermiticity_residual(H.matrix), 1e-3);
  const DiscreteHamiltonian S = assemble_hamiltonian(
      DiffeoFamily::identity(1), g, CoefficientSet::free(1), 0.5, BoundaryCondition::NaiveNeumann);
  EXPECT_LE(hermiticity_residual(S.matrix), 1e-14);
}

TEST(Hamiltonian, DofLayout) {
  const GridPtr g = ReferenceGrid::unit(2, 8);
  const DiscreteHamiltonian D = empty_hamiltonian(g, BoundaryCondition::Dirichlet);
  const DiscreteHamiltonian N = empty_hamiltonian(g, BoundaryCondition::MagneticNeumann);
  EXPECT_EQ(D.size(), 49);
  EXPECT_EQ(N.size(), 81);
  const GridFunction v =
      GridFunction::nodal(g, [](const Vec& y) { return Complex(y(0) * y(1), y(0)); });
  const GridFunction back = N.from_dofs(N.to_dofs(v));
  EXPECT_LT((back.values() - v.values()).norm(), 1e-14);
}

TEST(Hamiltonian, EnergyFormMatchesQuadratureNorms) {
  const GridPtr g = ReferenceGrid::unit(1, 200);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::constant(2.0), 1);
  const DiscreteHamiltonian H = assemble_hamiltonian(h, g, CoefficientSet::free(1), 0.0,
                                                     BoundaryCondition::Dirichlet);
  const GridFunction v = GridFunction::nodal(g, [](const Vec& y) {
    return Complex(std::sin(kPi * y(0)) / std::sqrt(2.0));
  });
  const double e = energy_form(H, v);
  const auto [grad2, mass2] = quadrature_norms(h, 0.0, v);
  EXPECT_NEAR(e, grad2, 1e-10);
  // u = sin(pi x / 2) / 2 on (0, 2): |u'|^2 integrates to pi^2 / 16.
  EXPECT_NEAR(e, kPi * kPi / 16.0, 1e-3);
  EXPECT_NEAR(mass2, 0.25, 1e-3);
}

TEST(Hamiltonian, Coercivity) {
  const GridPtr g = ReferenceGrid::unit(2, 8);
  const CoercivityBounds b =
      coercivity_bounds(DiffeoFamily::rotation(1.0), g, magnetic_coefficients(), 0.4);
  EXPECT_GT(b.gamma, 0.0);
  EXPECT_GE(b.kappa, 0.0);
}

TEST(Spectrum, DenseIntervalEigenvalues) {
  const GridPtr g = ReferenceGrid::unit(1, 400);
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::identity(1), g, CoefficientSet::free(1), 0.0, BoundaryCondition::Dirichlet);
  const Eigenpairs e = lowest_eigenpairs(H.matrix, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(e.values(k) / (kPi * kPi * (k + 1) * (k + 1)), 1.0, 1e-3);
    EXPECT_NEAR(e.vectors.col(k).norm(), 1.0, 1e-12);
  }
  EXPECT_LT((H.matrix * e.vectors.col(0) - e.values(0) * e.vectors.col(0)).norm(), 1e-8);
}

TEST(Spectrum, ShiftInvertPathOnSquare) {
  const GridPtr g = ReferenceGrid::unit(2, 48);  // 47^2 unknowns, above the dense limit
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::identity(2), g, CoefficientSet::free(2), 0.0, BoundaryCondition::Dirichlet);
  ASSERT_GT(H.size(), 1200);
  const Eigenpairs e = lowest_eigenpairs(H.matrix, 4);
  const double pi2 = kPi * kPi;
  EXPECT_NEAR(e.values(0) / (2 * pi2), 1.0, 2e-3);
  EXPECT_NEAR(e.values(1) / (5 * pi2), 1.0, 3e-3);
  EXPECT_NEAR(e.values(2) / (5 * pi2), 1.0, 3e-3);
  EXPECT_NEAR(e.values(3) / (8 * pi2), 1.0, 5e-3);
  for (int k = 0; k < 4; ++k) {
    const CVector r = H.matrix * e.vectors.col(k) - e.values(k) * e.vectors.col(k);
    EXPECT_LT(r.norm(), 1e-6 * e.values(k));
  }
}

TEST(Spectrum, ProjectorAndDegeneracy) {
  const GridPtr g = ReferenceGrid::unit(2, 16);
  const DiscreteHamiltonian H = assemble_hamiltonian(
      DiffeoFamily::identity(2), g, CoefficientSet::free(2), 0.0, BoundaryCondition::Dirichlet);
  const SpectralProjector P = spectral_projector(H, 0, 1e-6);
  EXPECT_NEAR(P.overlap(P.eigenvector), 1.0, 1e-12);
  EXPECT_LT((P.apply(P.apply(H.matrix.col(3))) - P.apply(H.matrix.col(3))).norm(), 1e-12);
  EXPECT_GT(P.gap, 0.0);
  // the second eigenvalue of the square is double
  EXPECT_THROW(spectral_projector(H, 1, 1e-6), DegenerateBranch);
}
