#include "movdom/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

GridFunction::GridFunction(GridPtr grid, Location where, int components)
    : grid_(std::move(grid)), where_(where), components_(components) {
  if (!grid_ || components_ < 1) {
    throw InvalidArgument("grid function needs a grid and components >= 1");
  }
  values_ = CVector::Zero(size() * components_);
}

GridFunction::GridFunction(GridPtr grid, Location where, int components,
                           CVector values)
    : GridFunction(std::move(grid), where, components) {
  if (values.size() != values_.size()) {
    throw InvalidArgument("grid function value array has the wrong length");
  }
  values_ = std::move(values);
}

GridFunction GridFunction::nodal(GridPtr grid,
                                 const std::function<Complex(const Vec&)>& fn) {
  GridFunction g(grid, Location::Nodes, 1);
  for (Index i = 0; i < g.size(); ++i) g(i) = fn(grid->node(i));
  return g;
}

GridFunction GridFunction::nodal_vector(
    GridPtr grid, const std::function<CVec(const Vec&)>& fn) {
  GridFunction g(grid, Location::Nodes, grid->dimension());
  for (Index i = 0; i < g.size(); ++i) {
    const CVec v = fn(grid->node(i));
    for (int k = 0; k < g.components(); ++k) g(i, k) = v(k);
  }
  return g;
}

GridFunction GridFunction::quadrature(GridPtr grid,
                                      const std::function<CVec(const Vec&)>& fn,
                                      int components) {
  GridFunction g(grid, Location::Quadrature, components);
  for (Index q = 0; q < g.size(); ++q) {
    const CVec v = fn(grid->quadrature_point(q));
    for (int k = 0; k < components; ++k) g(q, k) = v(k);
  }
  return g;
}

Index GridFunction::size() const {
  return where_ == Location::Nodes ? grid_->node_count()
                                   : grid_->quadrature_count();
}

Vec GridFunction::point(Index p) const {
  return where_ == Location::Nodes ? grid_->node(p) : grid_->quadrature_point(p);
}

double GridFunction::weight(Index p) const {
  return where_ == Location::Nodes ? grid_->weights()(p)
                                   : grid_->quadrature_weight();
}

CVec GridFunction::at(Index p) const {
  CVec v(components_);
  for (int k = 0; k < components_; ++k) v(k) = (*this)(p, k);
  return v;
}

CVec GridFunction::interpolate(const Vec& y) const {
  if (where_ != Location::Nodes) {
    throw InvalidArgument("interpolation needs nodal samples");
  }
  const auto loc = grid_->locate(y);
  const auto w = grid_->interpolation_weights(loc);
  const auto nodes = grid_->cell_nodes(loc.cell);
  CVec v = CVec::Zero(components_);
  for (int a = 0; a < grid_->nodes_per_cell(); ++a) {
    for (int k = 0; k < components_; ++k) v(k) += w[a] * (*this)(nodes[a], k);
  }
  return v;
}

GridFunction GridFunction::to_quadrature() const {
  if (where_ == Location::Quadrature) return *this;
  GridFunction out(grid_, Location::Quadrature, components_);
  const int nc = grid_->nodes_per_cell();
  for (Index c = 0; c < grid_->cell_count(); ++c) {
    const auto nodes = grid_->cell_nodes(c);
    for (int lq = 0; lq < nc; ++lq) {
      const Index q = c * nc + lq;
      for (int a = 0; a < nc; ++a) {
        const double s = grid_->shape(a, lq);
        for (int k = 0; k < components_; ++k) out(q, k) += s * (*this)(nodes[a], k);
      }
    }
  }
  return out;
}

bool GridFunction::same_layout(const GridFunction& other) const {
  return grid_ == other.grid_ && where_ == other.where_ &&
         components_ == other.components_;
}

Complex inner(const GridFunction& f, const GridFunction& g,
              const RVector* extra) {
  if (!f.same_layout(g)) {
    throw InvalidArgument("inner product of grid functions with different layouts");
  }
  Complex acc = 0.0;
  for (Index p = 0; p < f.size(); ++p) {
    Complex local = 0.0;
    for (int k = 0; k < f.components(); ++k) local += std::conj(f(p, k)) * g(p, k);
    double w = f.weight(p);
    if (extra) w *= (*extra)(p);
    acc += w * local;
  }
  return acc;
}

double norm(const GridFunction& f, const RVector* extra) {
  return std::sqrt(std::max(0.0, inner(f, f, extra).real()));
}

}  // namespace movdom
