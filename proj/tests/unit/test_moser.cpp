#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "movdom/errors.hpp"
#include "movdom/moser.hpp"

using namespace movdom;

namespace {

double sine_density(const Vec& y) {
  double p = 1.0;
  for (int k = 0; k < y.size(); ++k) p *= std::sin(2.0 * kPi * y(k));
  return 1.0 + 0.05 * p;
}

}  // namespace

TEST(Staggered, QResidualIsDeterminantIn2D) {
  Eigen::MatrixXd M(2, 2);
  M << 0.1, -0.2, 0.3, 0.05;
  EXPECT_NEAR(q_residual(M), M.determinant(), 1e-15);
  EXPECT_NEAR(q_residual(Eigen::MatrixXd::Constant(1, 1, 0.4)), 0.0, 1e-15);
}

TEST(Staggered, RightInverseSolvesDivergence) {
  for (int dim : {1, 2}) {
    const GridPtr g = ReferenceGrid::unit(dim, 24);
    const auto Linv = build_divergence_right_inverse(g);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    RVector v(g->cell_count());
    for (Index c = 0; c < v.size(); ++c) v(c) = n(rng);
    const StaggeredField u = Linv->apply(v);
    const RVector div = u.divergence();
    EXPECT_LT((div - (v.array() - v.mean()).matrix()).cwiseAbs().maxCoeff(), 1e-10)
        << "dimension " << dim;
  }
}

TEST(Staggered, OneDimensionalRightInverseIsAntiderivative) {
  const GridPtr g = ReferenceGrid::unit(1, 10);
  RVector v = RVector::Zero(10);
  v(0) = 1.0;
  v(9) = -1.0;
  const StaggeredField u = build_divergence_right_inverse(g)->apply(v);
  const double h = 0.1;
  for (int i = 1; i < 10; ++i) EXPECT_NEAR(u.face(0, i), h, 1e-14);
}

TEST(Moser, UniformDensityGivesIdentity) {
  const GridPtr g = ReferenceGrid::unit(2, 16);
  const MoserMap m = moser_fixed_point(DensityFamily::unit(), g, 0.0);
  EXPECT_LE(m.residual, 1e-12);
  for (Index i = 0; i < g->node_count(); ++i) {
    EXPECT_LT((m.forward[i] - g->node(i)).norm(), 1e-12);
  }
}

TEST(Moser, OneDimensionalAntiderivativeOracle) {
  const GridPtr g = ReferenceGrid::unit(1, 200);
  const MoserMap m = moser_fixed_point(
      DensityFamily::stationary([](const Vec& y) { return 1.0 + 0.1 * std::sin(2 * kPi * y(0)); }),
      g, 0.0);
  for (Index i = 0; i < g->node_count(); ++i) {
    const double y = g->node(i)(0);
    EXPECT_NEAR(m.forward[i](0), y + 0.1 * (1.0 - std::cos(2 * kPi * y)) / (2 * kPi), 1e-6);
  }
}

TEST(Moser, FixedPointConvergesIn2D) {
  const GridPtr g = ReferenceGrid::unit(2, 32);
  const MoserMap m = moser_fixed_point(DensityFamily::stationary(sine_density, true), g, 0.0);
  EXPECT_LE(m.iterations, 30);
  EXPECT_LE(m.residual, 1e-3);
  EXPECT_GT(m.det.minCoeff(), 0.0);
  // both maps are nodal interpolants, so they invert each other up to O(h^2)
  const Vec y = g->node(g->node_index(11, 20));
  EXPECT_LT((m.apply_inverse(m.apply(y)) - y).norm(), 1e-3);
}

TEST(Moser, ContractionBoundIsEnforced) {
  const GridPtr g = ReferenceGrid::unit(2, 16);
  const DensityFamily strong = DensityFamily::stationary(
      [](const Vec& y) { return 1.0 + 0.5 * std::sin(2 * kPi * y(0)); }, true);
  EXPECT_THROW(moser_fixed_point(strong, g, 0.0), ContractionBoundExceeded);
}

TEST(Moser, NegativeDensityIsRejected) {
  const GridPtr g = ReferenceGrid::unit(1, 16);
  const DensityFamily bad = DensityFamily::stationary(
      [](const Vec& y) { return 1.0 + 2.0 * std::sin(2 * kPi * y(0)); });
  EXPECT_THROW(bad.validate(*g, {0.0}), NonPositiveDensity);
}

TEST(Moser, CombinedHandlesLargeDeviation) {
  const GridPtr g = ReferenceGrid::unit(2, 24);
  const DensityFamily strong = DensityFamily::stationary(
      [](const Vec& y) { return 1.0 + 0.4 * std::sin(2 * kPi * y(0)) * std::sin(kPi * y(1)); },
      true);
  const std::vector<MoserMap> maps = moser_combined(strong, g, {0.0});
  ASSERT_EQ(maps.size(), 1u);
  const RVector target = strong.cell_averages(*g, 0.0);
  EXPECT_LE((maps[0].det - target).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Moser, PolishMatchesTargetMeasures) {
  const GridPtr g = ReferenceGrid::unit(2, 12);
  std::vector<Vec> nodes = nodal_identity(*g);
  RVector target(g->cell_count());
  for (Index c = 0; c < target.size(); ++c) target(c) = sine_density(g->cell_center(c));
  target.array() /= target.mean();
  const double r = polish_cell_measures(*g, nodes, target);
  EXPECT_LE(r, 1e-9);
  EXPECT_LE((q1_cell_determinants(*g, nodes) - target).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Moser, NormalizeDiffeoMatchesVolumeRatio) {
  DiffeoFamily::Parts p;
  p.dimension = 2;
  p.map = [](double t, const Vec& y) {
    const double b = 0.1 * t * std::sin(kPi * y(0)) * std::sin(kPi * y(1));
    Vec x(2);
    x << y(0) * (1.0 + 0.5 * t) + 0.3 * b, y(1) + 0.2 * b;
    return x;
  };
  const GridPtr g = ReferenceGrid::unit(2, 24);
  const NormalizedDiffeo nd = normalize_diffeo(DiffeoFamily(p), g, {0.0, 1.0});
  EXPECT_NEAR(nd.volume_ratio[0], 1.0, 1e-10);
  EXPECT_NEAR(nd.volume_ratio[1], 1.5, 1e-3);
  for (double r : nd.relative_residual) EXPECT_LE(r, 1e-3);
  EXPECT_THROW(nd.family.map(0.5, g->node(0)), InvalidArgument);
}
