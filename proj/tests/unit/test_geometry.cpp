#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "movdom/calculus.hpp"
#include "movdom/errors.hpp"

using namespace movdom;

namespace {

DiffeoFamily bent_family() {
  DiffeoFamily::Parts p;
  p.dimension = 2;
  p.name = "bent";
  p.map = [](double t, const Vec& y) {
    Vec x(2);
    x << y(0) * (1.0 + 0.3 * t * t) + 0.1 * t * y(1) * y(1),
        y(1) + 0.2 * std::sin(t) * y(0) * y(1);
    return x;
  };
  return DiffeoFamily(p);
}

Vec point(double a, double b) {
  Vec y(2);
  y << a, b;
  return y;
}

}  // namespace

TEST(Paths, SmoothstepEndpoints) {
  EXPECT_DOUBLE_EQ(smoothstep5(0.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep5(1.0), 1.0);
  EXPECT_DOUBLE_EQ(smoothstep5_d1(0.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep5_d1(1.0), 0.0);
  EXPECT_DOUBLE_EQ(smoothstep5_d2(1.0), 0.0);
  EXPECT_NEAR(smoothstep5(0.5), 0.5, 1e-15);
}

TEST(Paths, RampDerivativesMatchDifferences) {
  const ScalarPath r = ScalarPath::smooth_ramp(1.0, 1.5, 0.0, 2.0);
  for (double t : {0.3, 0.9, 1.4}) {
    const double h = 1e-5;
    EXPECT_NEAR(r.d1(t), (r(t + h) - r(t - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(r.d2(t), (r.d1(t + h) - r.d1(t - h)) / (2 * h), 1e-7);
  }
  const ScalarPath s = r.time_rescaled(0.5);
  EXPECT_DOUBLE_EQ(s(2.0), r(1.0));
  EXPECT_DOUBLE_EQ(s.d1(2.0), 0.5 * r.d1(1.0));
}

TEST(Grid, WeightsIntegrateConstants) {
  const GridPtr g = ReferenceGrid::unit(2, 10);
  EXPECT_EQ(g->node_count(), 121);
  EXPECT_EQ(g->cell_count(), 100);
  EXPECT_NEAR(g->weights().sum(), 1.0, 1e-14);
  EXPECT_EQ(g->interior_nodes().size(), 81u);
  const GridPtr r = ReferenceGrid::rectangle(-0.5, 0.5, -1.0, 1.0, 4, 8);
  EXPECT_NEAR(r->measure(), 2.0, 1e-15);
  EXPECT_NEAR(r->weights().sum(), 2.0, 1e-14);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(ReferenceGrid::interval(1.0, 0.0, 10), InvalidArgument);
  EXPECT_THROW(ReferenceGrid::unit(1, 1), InvalidArgument);
  EXPECT_THROW(ReferenceGrid::unit(3, 10), InvalidArgument);
}

TEST(Diffeo, AnalyticAndDifferenceJacobiansAgree) {
  const DiffeoFamily rot = DiffeoFamily::rotation(0.7);
  const DiffeoFamily fd = rot.without_analytic_jacobian();
  const Vec y = point(0.2, -0.3);
  EXPECT_LT((rot.jacobian(0.4, y) - fd.jacobian(0.4, y)).norm(), 1e-8);
  EXPECT_NEAR(rot.jacobian(0.4, y).determinant(), 1.0, 1e-14);
  EXPECT_LT((rot.inverse(0.4, rot.map(0.4, y)) - y).norm(), 1e-14);
}

TEST(Diffeo, FrozenAndRescaled) {
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::linear(1.0, 0.5), 1);
  const Vec y = Vec::Constant(1, 0.4);
  EXPECT_NEAR(h.frozen(1.0).map(5.0, y)(0), 0.6, 1e-15);
  EXPECT_NEAR(h.frozen(1.0).velocity(5.0, y)(0), 0.0, 1e-15);
  EXPECT_NEAR(h.time_rescaled(0.1).map(10.0, y)(0), 0.6, 1e-15);
  EXPECT_NEAR(h.time_rescaled(0.1).velocity(10.0, y)(0), 0.1 * 0.5 * 0.4, 1e-12);
}

TEST(Calculus, DegenerateJacobianIsReported) {
  const DiffeoFamily squash = DiffeoFamily::homothety(ScalarPath::linear(1.0, -1.0), 1);
  EXPECT_THROW(jacobian_at(squash, 1.0, Vec::Constant(1, 0.5)), DegenerateJacobian);
}

TEST(Calculus, PullbackOfLinearField) {
  const GridPtr g = ReferenceGrid::unit(2, 8);
  const DiffeoFamily h = bent_family();
  const GridFunction p = pullback(
      h, 0.7, [](const Vec& x) { return Complex(2.0 * x(0) - x(1), 0.0); }, g);
  for (Index i = 0; i < g->node_count(); ++i) {
    const Vec x = h.map(0.7, g->node(i));
    EXPECT_NEAR(p(i).real(), 2.0 * x(0) - x(1), 1e-14);
  }
}

TEST(Calculus, SharpenRoundTrip) {
  const GridPtr g = ReferenceGrid::unit(2, 6);
  const DiffeoFamily h = bent_family();
  const GridFunction w =
      GridFunction::nodal(g, [](const Vec& y) { return Complex(y(0), y(1) * y(1)); });
  const GridFunction back = unsharpen(h, 0.5, sharpen(h, 0.5, w));
  EXPECT_LT((back.values() - w.values()).norm(), 1e-14);
}

TEST(Calculus, SharpPullbackPreservesNorm) {
  // int |u|^2 over the moving domain equals the lumped norm of the sharp pullback.
  const GridPtr g = ReferenceGrid::unit(1, 400);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::constant(2.0), 1);
  const GridFunction v = pullback_sharp(
      h, 0.0, [](const Vec& x) { return Complex(std::sin(kPi * x(0) / 2.0)); }, g);
  EXPECT_NEAR(norm(v) * norm(v), 1.0, 1e-5);
}

TEST(Calculus, PulledGradientOfLinearFunctionIsExact) {
  const GridPtr g = ReferenceGrid::unit(1, 16);
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::constant(3.0), 1);
  const GridFunction f = pullback(h, 0.0, [](const Vec& x) { return Complex(x(0)); }, g);
  const GridFunction grad = pulled_gradient(h, 0.0, f);
  for (Index q = 0; q < grad.size(); ++q) EXPECT_NEAR(grad(q).real(), 1.0, 1e-13);
}

TEST(Calculus, PulledLaplacianSecondOrder) {
  const double ell = 1.7;
  const DiffeoFamily h = DiffeoFamily::homothety(ScalarPath::constant(ell), 1);
  double prev = 0.0;
  for (int n : {25, 50, 100, 200}) {
    const GridPtr g = ReferenceGrid::unit(1, n);
    const GridFunction s =
        GridFunction::nodal(g, [](const Vec& y) { return Complex(std::sin(kPi * y(0))); });
    const GridFunction lap = pulled_laplacian(h, 0.0, s);
    double err = 0.0;
    for (Index i : g->interior_nodes()) {
      err = std::max(err, std::abs(lap(i) + std::pow(kPi / ell, 2) *
                                                std::sin(kPi * g->node(i)(0))));
    }
    if (prev > 0.0) EXPECT_GE(std::log2(prev / err), 1.9);
    prev = err;
  }
}

TEST(Calculus, JacobiFormulaMatchesLogDetDifference) {
  const DiffeoFamily h = bent_family();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double t = u(rng);
    const Vec y = point(u(rng), u(rng));
    const double d = 1e-4;
    const double fd = (std::log(h.jacobian(t + d, y).determinant()) -
                       std::log(h.jacobian(t - d, y).determinant())) /
                      (2 * d);
    EXPECT_NEAR(jacobian_log_derivative(h, t, y), fd, 1e-6);
  }
}

TEST(Calculus, PushforwardInvertsPullback) {
  const GridPtr g = ReferenceGrid::unit(2, 10);
  const DiffeoFamily h = DiffeoFamily::rotation(1.0);
  const GridFunction p =
      pullback(h, 0.3, [](const Vec& x) { return Complex(x(0) + 2.0 * x(1)); }, g);
  const ScalarField back = pushforward(h, 0.3, p);
  const Vec x = h.map(0.3, point(0.35, 0.6));
  EXPECT_NEAR(back(x).real(), x(0) + 2.0 * x(1), 1e-12);
}
