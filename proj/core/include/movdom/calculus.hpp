#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "movdom/diffeo.hpp"
#include "movdom/grid_function.hpp"

namespace movdom {

using ScalarField = std::function<Complex(const Vec& x)>;
using VectorField = std::function<CVec(const Vec& x)>;

/// Jacobian data of h(t, .) at y. Throws DegenerateJacobian if det <= 0.
JacobianData jacobian_at(const DiffeoFamily& family, double t, const Vec& y);

/// Jacobian data at every node and every Gauss point of the grid.
struct GeometrySample {
  double time = 0.0;
  GridPtr grid;
  std::vector<JacobianData> nodes;
  std::vector<JacobianData> quadrature;
  RVector node_det;
  RVector quadrature_det;
};
GeometrySample sample_geometry(const DiffeoFamily& family, const GridPtr& grid,
                               double t);

/// (h* phi)(y) = phi(h(t, y)) at the nodes.
GridFunction pullback(const DiffeoFamily& family, double t,
                      const ScalarField& field, const GridPtr& grid);
GridFunction pullback(const DiffeoFamily& family, double t,
                      const VectorField& field, const GridPtr& grid,
                      int components);

/// x -> g(h^{-1}(t, x)) using the multilinear interpolant of g.
ScalarField pushforward(const DiffeoFamily& family, double t,
                        const GridFunction& g);
/// The pushforward sampled at the image nodes h(t, y_i): pairs (x_i, g_i).
std::vector<std::pair<Vec, Complex>> pushforward_at_images(
    const DiffeoFamily& family, double t, const GridFunction& g);

/// sqrt|J| (phi o h)
GridFunction pullback_sharp(const DiffeoFamily& family, double t,
                            const ScalarField& field, const GridPtr& grid);
/// x -> g(y) / sqrt|J(t, y)| with y = h^{-1}(t, x).
ScalarField pushforward_sharp(const DiffeoFamily& family, double t,
                              const GridFunction& g);
/// Nodewise multiplication by sqrt|J| and its inverse.
GridFunction sharpen(const DiffeoFamily& family, double t, const GridFunction& w);
GridFunction unsharpen(const DiffeoFamily& family, double t,
                       const GridFunction& v);

/// (J^{-1})^t grad_y g at the Gauss points (g nodal, continuous multilinear).
GridFunction pulled_gradient(const DiffeoFamily& family, double t,
                             const GridFunction& g);

/// Weak divergence of A on the moving domain, pulled back to the nodes:
///   (div A)_i = -(1 / (w_i |J_i|)) sum_q w_q |J_q| <J_q^{-1} A_q, grad N_i(q)>.
/// Nodal A is first interpolated to the Gauss points. Boundary nodes carry
/// the boundary flux.
GridFunction pulled_divergence(const DiffeoFamily& family, double t,
                               const GridFunction& A);

/// pulled_divergence(pulled_gradient(g)).
GridFunction pulled_laplacian(const DiffeoFamily& family, double t,
                              const GridFunction& g);

/// Tr(J^{-1} dJ/dt) = d/dt log|J|.
double jacobian_log_derivative(const DiffeoFamily& family, double t,
                               const Vec& y);

}  // namespace movdom
