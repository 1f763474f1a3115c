#include <cmath>

#include <gtest/gtest.h>

#include "movdom/adiabatic.hpp"
#include "movdom/errors.hpp"
#include "movdom/scenarios.hpp"

using namespace movdom;

TEST(Scenarios, RegistryBuildsEveryName) {
  for (const std::string& name : scenario_names()) {
    ScenarioParameters p;
    p.cells = name == "rotation" ? 12 : 40;
    const ScenarioDef s = build_scenario(name, p);
    EXPECT_EQ(s.name, name);
    const GridFunction v0 = s.initial_state();
    EXPECT_NEAR(norm(v0), 1.0, 1e-10) << name;
    EXPECT_LE(hermiticity_residual(s.hamiltonian(0.5 * (s.t_start + s.t_end)).matrix), 1e-12)
        << name;
  }
}

TEST(Scenarios, UnknownNameListsAlternatives) {
  try {
    build_scenario("spiral", ScenarioParameters{});
    FAIL() << "expected ConfigInvalid";
  } catch (const ConfigInvalid& e) {
    EXPECT_NE(std::string(e.what()).find("moving_interval"), std::string::npos);
  }
}

TEST(Scenarios, CylinderForcesMagneticNeumann) {
  ScenarioOptions o;
  o.cells = 40;
  o.bc = BoundaryCondition::Dirichlet;
  const ScenarioDef s = cylinder_scenario(ScalarPath::linear(1.0, 0.5), o);
  EXPECT_EQ(s.bc, BoundaryCondition::MagneticNeumann);
  const auto [fixed, moving] = cylinder_flux_coefficients(s, 0.5);
  EXPECT_NEAR(std::abs(fixed), 0.0, 1e-14);
  // -(i/2) times the speed of the moving end
  EXPECT_NEAR(moving.real(), 0.0, 1e-12);
  EXPECT_NEAR(moving.imag(), -0.25, 1e-9);
}

TEST(Scenarios, HomothetyReparametrization) {
  const ScalarPath f = ScalarPath::linear(1.0, 0.5);
  const Reparametrization r = homothety_reparametrization(f, 0.0);
  for (double t : {0.0, 0.3, 1.0, 2.0}) {
    EXPECT_NEAR(r.tau(t), t / (1.0 + 0.5 * t), 1e-12);
    EXPECT_NEAR(r.time(r.tau(t)), t, 1e-10);
  }
}

TEST(Scenarios, GaugeCompatibility) {
  ScenarioOptions o;
  o.cells = 60;
  for (const ScenarioDef& s :
       {translation_scenario({ScalarPath::cubic(0, 0, 0.5, 0)}, o),
        homothety_scenario(ScalarPath::cubic(1, 0.5, 0.5, 0), o)}) {
    ASSERT_TRUE(s.gauge.has_value());
    EXPECT_LE(gauge_compatibility_residual_random(*s.gauge, s.family, s.grid, 0.0, 1.0, 20, 3),
              1e-10)
        << s.name;
  }
  GaugeSpec bad;
  bad.phase = [](double, const Vec& x) { return x(0); };
  bad.gradient = [](double, const Vec&) { return Vec::Ones(1); };
  bad.rate = [](double, const Vec&) { return 0.0; };
  const ScenarioDef s = homothety_scenario(ScalarPath::cubic(1, 0.5, 0.5, 0), o);
  EXPECT_GT(gauge_compatibility_residual(bad, s.family, 0.5, s.grid), 1e-3);
  EXPECT_THROW(apply_gauge(s.initial_state(), bad, s.family, 0.5), GaugeIncompatible);
}

TEST(Scenarios, TranslationGaugeEquivalence) {
  ScenarioOptions o;
  o.cells = 100;
  PropagatorConfig pc;
  pc.dt = 2e-3;
  const GaugeReport r =
      gauge_equivalence_check(translation_scenario({ScalarPath::cubic(0, 0, 0.5, 0)}, o), pc);
  EXPECT_GE(r.fidelity, 1.0 - 1e-6);
}

TEST(Scenarios, HomothetyGaugeEquivalence) {
  ScenarioOptions o;
  o.cells = 100;
  PropagatorConfig pc;
  pc.dt = 2e-3;
  const GaugeReport r =
      gauge_equivalence_check(homothety_scenario(ScalarPath::cubic(1, 0.5, 0.5, 0), o), pc);
  EXPECT_GE(r.fidelity, 1.0 - 1e-5);
}

TEST(Scenarios, RotationAssembliesAgree) {
  const RotationAssemblies r = rotation_assemblies(1.0, 24, 0.7);
  EXPECT_LE(r.transport_vs_magnetic, 1e-12);
  EXPECT_LE(r.general_vs_magnetic, 1e-12);
}

TEST(Adiabatic, StaticFamilyKeepsOverlap) {
  const GridPtr g = ReferenceGrid::unit(1, 50);
  AdiabaticConfig c;
  c.epsilons = {0.5, 0.25};
  c.dt = 1e-2;
  c.branch_samples = 3;
  const AdiabaticRun run = adiabatic_experiment(DiffeoFamily::identity(1),
                                                CoefficientSet::free(1), g,
                                                BoundaryCondition::Dirichlet, c);
  ASSERT_EQ(run.final_overlaps.size(), 2u);
  for (double o : run.final_overlaps) EXPECT_NEAR(o, 1.0, 1e-10);
}

TEST(Adiabatic, SlowerIsCloser) {
  const GridPtr g = ReferenceGrid::unit(1, 50);
  AdiabaticConfig c;
  c.epsilons = {0.5, 0.05};
  c.dt = 5e-3;
  const AdiabaticRun run = adiabatic_experiment(
      DiffeoFamily::homothety(ScalarPath::smooth_ramp(1.0, 1.5), 1), CoefficientSet::free(1), g,
      BoundaryCondition::Dirichlet, c);
  EXPECT_LE(run.deviation(1), run.deviation(0));
  EXPECT_GE(run.final_overlaps[1], 0.99);
}

TEST(Adiabatic, RejectsBadEpsilonLists) {
  const GridPtr g = ReferenceGrid::unit(1, 20);
  AdiabaticConfig c;
  c.epsilons = {0.1, 0.2};
  EXPECT_THROW(adiabatic_experiment(DiffeoFamily::identity(1), CoefficientSet::free(1), g,
                                    BoundaryCondition::Dirichlet, c),
               InvalidArgument);
  c.epsilons = {0.1};
  EXPECT_THROW(adiabatic_experiment(DiffeoFamily::identity(1), CoefficientSet::free(1), g,
                                    BoundaryCondition::NaiveNeumann, c),
               InvalidArgument);
}
