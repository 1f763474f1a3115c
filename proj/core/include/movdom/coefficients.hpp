#pragma once

#include <functional>

#include "movdom/diffeo.hpp"
#include "movdom/grid_function.hpp"

namespace movdom {

/// Diffusion D, magnetic A and electric V coefficients on the moving
/// domain. Empty evaluators mean D = I, A = 0, V = 0.
struct CoefficientSet {
  int dimension = 1;
  std::function<Mat(double, const Vec&)> diffusion;
  std::function<Vec(double, const Vec&)> magnetic;
  std::function<double(double, const Vec&)> electric;
  double alpha = 1.0;  // ellipticity floor: |D xi|^2 >= alpha |xi|^2

  static CoefficientSet free(int dimension);

  Mat D(double t, const Vec& x) const;
  Vec A(double t, const Vec& x) const;
  double V(double t, const Vec& x) const;
};

/// Throws EllipticityViolated if D is not symmetric or not elliptic.
void check_ellipticity(const Mat& D, double alpha);

struct MagneticPotential {
  /// x -> -1/2 (h_* d/dt h)(t, x); needs the inverse of h unless the family
  /// is motionless.
  std::function<Vec(const Vec&)> on_domain;
  /// -1/2 d/dt h(t, y) at the nodes.
  GridFunction pulled;
};

MagneticPotential magnetic_potential(const DiffeoFamily& family, double t,
                                     const GridPtr& grid);

/// Effective coefficients at the image point x = h(t, y).
struct EffectiveValues {
  Vec A_h;
  Vec A_tilde;
  double V_tilde = 0.0;
  Mat D;
};
EffectiveValues effective_at(const CoefficientSet& coeffs,
                             const DiffeoFamily& family, double t, const Vec& y);

struct EffectivePotentials {
  std::function<Vec(const Vec&)> A_h;
  std::function<Vec(const Vec&)> A_tilde;
  std::function<double(const Vec&)> V_tilde;
};

/// Evaluators on the moving domain:
///   A~ = A + (D^{-1})^t A_h,
///   V~ = V - |(D^{-1})^t A_h|^2 - 2 <(D^{-1})^t A_h, A>.
EffectivePotentials effective_coefficients(const CoefficientSet& coeffs,
                                           const DiffeoFamily& family, double t);

}  // namespace movdom
