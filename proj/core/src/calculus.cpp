#include "movdom/calculus.hpp"

#include <cmath>
#include <string>

#include "movdom/errors.hpp"

namespace movdom {

namespace {

std::string describe(const Vec& y) {
  std::string s = "at y=(";
  for (Index k = 0; k < y.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(y(k));
  }
  return s + ")";
}

void require_nodal(const GridFunction& g, const char* what) {
  if (g.location() != Location::Nodes) {
    throw InvalidArgument(std::string(what) + " needs nodal samples");
  }
}

Complex checked(Complex v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw EvaluationOutsideDomain("field not evaluable at an image point");
  }
  return v;
}

}  // namespace

JacobianData jacobian_at(const DiffeoFamily& family, double t, const Vec& y) {
  family.check_time(t);
  JacobianData d = make_jacobian_data(family.jacobian(t, y));
  if (!(d.det > 0.0) || !std::isfinite(d.det)) {
    throw DegenerateJacobian(t, d.det, describe(y));
  }
  return d;
}

GeometrySample sample_geometry(const DiffeoFamily& family, const GridPtr& grid,
                               double t) {
  GeometrySample s;
  s.time = t;
  s.grid = grid;
  s.nodes.reserve(grid->node_count());
  s.node_det.resize(grid->node_count());
  for (Index i = 0; i < grid->node_count(); ++i) {
    s.nodes.push_back(jacobian_at(family, t, grid->node(i)));
    s.node_det(i) = s.nodes.back().det;
  }
  s.quadrature.reserve(grid->quadrature_count());
  s.quadrature_det.resize(grid->quadrature_count());
  for (Index q = 0; q < grid->quadrature_count(); ++q) {
    s.quadrature.push_back(jacobian_at(family, t, grid->quadrature_point(q)));
    s.quadrature_det(q) = s.quadrature.back().det;
  }
  return s;
}

GridFunction pullback(const DiffeoFamily& family, double t,
                      const ScalarField& field, const GridPtr& grid) {
  family.check_time(t);
  GridFunction g(grid, Location::Nodes, 1);
  for (Index i = 0; i < grid->node_count(); ++i) {
    g(i) = checked(field(family.map(t, grid->node(i))));
  }
  return g;
}

GridFunction pullback(const DiffeoFamily& family, double t,
                      const VectorField& field, const GridPtr& grid,
                      int components) {
  family.check_time(t);
  GridFunction g(grid, Location::Nodes, components);
  for (Index i = 0; i < grid->node_count(); ++i) {
    const CVec v = field(family.map(t, grid->node(i)));
    if (v.size() != components) {
      throw InvalidArgument("vector field has the wrong number of components");
    }
    for (int k = 0; k < components; ++k) g(i, k) = checked(v(k));
  }
  return g;
}

ScalarField pushforward(const DiffeoFamily& family, double t,
                        const GridFunction& g) {
  require_nodal(g, "pushforward");
  if (!family.has_inverse()) {
    throw InverseUnavailable("pushforward needs an inverse evaluator");
  }
  return [family, t, g](const Vec& x) {
    return g.interpolate(family.inverse(t, x))(0);
  };
}

std::vector<std::pair<Vec, Complex>> pushforward_at_images(
    const DiffeoFamily& family, double t, const GridFunction& g) {
  require_nodal(g, "pushforward");
  std::vector<std::pair<Vec, Complex>> out;
  out.reserve(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    out.emplace_back(family.map(t, g.grid()->node(i)), g(i));
  }
  return out;
}

GridFunction sharpen(const DiffeoFamily& family, double t,
                     const GridFunction& w) {
  require_nodal(w, "sharpen");
  GridFunction v = w;
  for (Index i = 0; i < v.size(); ++i) {
    const double s = std::sqrt(jacobian_at(family, t, v.point(i)).det);
    for (int k = 0; k < v.components(); ++k) v(i, k) *= s;
  }
  return v;
}

GridFunction unsharpen(const DiffeoFamily& family, double t,
                       const GridFunction& v) {
  require_nodal(v, "unsharpen");
  GridFunction w = v;
  for (Index i = 0; i < w.size(); ++i) {
    const double s = std::sqrt(jacobian_at(family, t, w.point(i)).det);
    for (int k = 0; k < w.components(); ++k) w(i, k) /= s;
  }
  return w;
}

GridFunction pullback_sharp(const DiffeoFamily& family, double t,
                            const ScalarField& field, const GridPtr& grid) {
  return sharpen(family, t, pullback(family, t, field, grid));
}

ScalarField pushforward_sharp(const DiffeoFamily& family, double t,
                              const GridFunction& g) {
  require_nodal(g, "pushforward");
  if (!family.has_inverse()) {
    throw InverseUnavailable("pushforward needs an inverse evaluator");
  }
  return [family, t, g](const Vec& x) {
    const Vec y = family.inverse(t, x);
    const double det = jacobian_at(family, t, y).det;
    return g.interpolate(y)(0) / std::sqrt(det);
  };
}

GridFunction pulled_gradient(const DiffeoFamily& family, double t,
                             const GridFunction& g) {
  require_nodal(g, "pulled_gradient");
  if (g.components() != 1) {
    throw InvalidArgument("pulled_gradient needs a scalar grid function");
  }
  const GridPtr& grid = g.grid();
  const int dim = grid->dimension();
  const int nc = grid->nodes_per_cell();
  GridFunction out(grid, Location::Quadrature, dim);
  for (Index c = 0; c < grid->cell_count(); ++c) {
    const auto nodes = grid->cell_nodes(c);
    for (int lq = 0; lq < nc; ++lq) {
      const Index q = c * nc + lq;
      const JacobianData jd = jacobian_at(family, t, grid->quadrature_point(q));
      CVec grad = CVec::Zero(dim);
      for (int a = 0; a < nc; ++a) {
        grad += g(nodes[a]) * grid->shape_gradient(a, lq).cast<Complex>();
      }
      const CVec pulled = jd.inverse_transpose.cast<Complex>() * grad;
      for (int k = 0; k < dim; ++k) out(q, k) = pulled(k);
    }
  }
  return out;
}

GridFunction pulled_divergence(const DiffeoFamily& family, double t,
                               const GridFunction& A) {
  const GridPtr& grid = A.grid();
  const int dim = grid->dimension();
  if (A.components() != dim) {
    throw InvalidArgument("pulled_divergence needs a vector grid function");
  }
  const GridFunction Aq = A.to_quadrature();
  const int nc = grid->nodes_per_cell();
  const double wq = grid->quadrature_weight();
  GridFunction out(grid, Location::Nodes, 1);
  for (Index c = 0; c < grid->cell_count(); ++c) {
    const auto nodes = grid->cell_nodes(c);
    for (int lq = 0; lq < nc; ++lq) {
      const Index q = c * nc + lq;
      const JacobianData jd = jacobian_at(family, t, grid->quadrature_point(q));
      const CVec flux = (wq * jd.det) * (jd.inverse.cast<Complex>() * Aq.at(q));
      for (int a = 0; a < nc; ++a) {
        out(nodes[a]) -= flux.cwiseProduct(grid->shape_gradient(a, lq).cast<Complex>()).sum();
      }
    }
  }
  for (Index i = 0; i < out.size(); ++i) {
    const double det = jacobian_at(family, t, grid->node(i)).det;
    out(i) /= grid->weights()(i) * det;
  }
  return out;
}

GridFunction pulled_laplacian(const DiffeoFamily& family, double t,
                              const GridFunction& g) {
  return pulled_divergence(family, t, pulled_gradient(family, t, g));
}

double jacobian_log_derivative(const DiffeoFamily& family, double t,
                               const Vec& y) {
  const JacobianData jd = jacobian_at(family, t, y);
  return (jd.inverse * family.jacobian_rate(t, y)).trace();
}

}  // namespace movdom
