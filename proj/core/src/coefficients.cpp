#include "movdom/coefficients.hpp"

#include <cmath>

#include <Eigen/LU>

#include "movdom/errors.hpp"

namespace movdom {

CoefficientSet CoefficientSet::free(int dimension) {
  CoefficientSet c;
  c.dimension = dimension;
  return c;
}

Mat CoefficientSet::D(double t, const Vec& x) const {
  if (diffusion) return diffusion(t, x);
  return Mat::Identity(dimension, dimension);
}

Vec CoefficientSet::A(double t, const Vec& x) const {
  if (magnetic) return magnetic(t, x);
  return Vec::Zero(dimension);
}

double CoefficientSet::V(double t, const Vec& x) const {
  return electric ? electric(t, x) : 0.0;
}

void check_ellipticity(const Mat& D, double alpha) {
  const double scale = D.cwiseAbs().maxCoeff();
  if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw EllipticityViolated("diffusion matrix is not symmetric");
  }
  // Smallest eigenvalue of D^t D = D^2.
  const Mat S = D * D;
  double lowest;
  if (S.rows() == 1) {
    lowest = S(0, 0);
  } else {
    const double m = 0.5 * (S(0, 0) + S(1, 1));
    const double d = 0.5 * (S(0, 0) - S(1, 1));
    lowest = m - std::sqrt(d * d + S(0, 1) * S(1, 0));
  }
  if (lowest < alpha * (1.0 - 1e-12)) {
    throw EllipticityViolated("diffusion matrix below the ellipticity floor");
  }
}

MagneticPotential magnetic_potential(const DiffeoFamily& family, double t,
                                     const GridPtr& grid) {
  family.check_time(t);
  MagneticPotential out;
  const int dim = family.dimension();
  out.pulled = GridFunction(grid, Location::Nodes, dim);
  for (Index i = 0; i < grid->node_count(); ++i) {
    const Vec a = -0.5 * family.velocity(t, grid->node(i));
    for (int k = 0; k < dim; ++k) out.pulled(i, k) = a(k);
  }
  if (family.motionless()) {
    out.on_domain = [dim](const Vec&) { return Vec(Vec::Zero(dim)); };
  } else {
    out.on_domain = [family, t](const Vec& x) {
      return Vec(-0.5 * family.velocity(t, family.inverse(t, x)));
    };
  }
  return out;
}

EffectiveValues effective_at(const CoefficientSet& coeffs,
                             const DiffeoFamily& family, double t, const Vec& y) {
  const Vec x = family.map(t, y);
  EffectiveValues e;
  e.A_h = -0.5 * family.velocity(t, y);
  Vec B;
  if (coeffs.diffusion) {
    e.D = coeffs.diffusion(t, x);
    check_ellipticity(e.D, coeffs.alpha);
    B = e.D.transpose().lu().solve(e.A_h);
  } else {
    e.D = Mat::Identity(coeffs.dimension, coeffs.dimension);
    B = e.A_h;
  }
  const Vec A = coeffs.A(t, x);
  e.A_tilde = A + B;
  e.V_tilde = coeffs.V(t, x) - B.squaredNorm() - 2.0 * B.dot(A);
  return e;
}

EffectivePotentials effective_coefficients(const CoefficientSet& coeffs,
                                           const DiffeoFamily& family, double t) {
  family.check_time(t);
  const int dim = family.dimension();
  auto a_h = [family, t, dim](const Vec& x) -> Vec {
    if (family.motionless()) return Vec::Zero(dim);
    return -0.5 * family.velocity(t, family.inverse(t, x));
  };
  auto shifted = [coeffs, t, a_h](const Vec& x) -> Vec {
    const Mat D = coeffs.D(t, x);
    return D.transpose().lu().solve(a_h(x));
  };
  EffectivePotentials out;
  out.A_h = a_h;
  out.A_tilde = [coeffs, t, shifted](const Vec& x) -> Vec {
    return coeffs.A(t, x) + shifted(x);
  };
  out.V_tilde = [coeffs, t, shifted](const Vec& x) {
    const Vec B = shifted(x);
    return coeffs.V(t, x) - B.squaredNorm() - 2.0 * B.dot(coeffs.A(t, x));
  };
  return out;
}

}  // namespace movdom
