#pragma once

#include <functional>

#include "movdom/grid.hpp"
#include "movdom/types.hpp"

namespace movdom {

/// Where the samples of a GridFunction live.
enum class Location { Nodes, Quadrature };

/// Complex scalar or N-vector samples on a ReferenceGrid, either at the
/// nodes (lumped weights) or at the Gauss points of the cells.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridPtr grid, Location where, int components = 1);
  GridFunction(GridPtr grid, Location where, int components, CVector values);

  static GridFunction nodal(GridPtr grid,
                            const std::function<Complex(const Vec&)>& fn);
  static GridFunction nodal_vector(GridPtr grid,
                                   const std::function<CVec(const Vec&)>& fn);
  static GridFunction quadrature(GridPtr grid,
                                 const std::function<CVec(const Vec&)>& fn,
                                 int components);

  const GridPtr& grid() const { return grid_; }
  Location location() const { return where_; }
  int components() const { return components_; }
  Index size() const;  // number of sample points
  Vec point(Index p) const;
  double weight(Index p) const;

  Complex& operator()(Index p, int k = 0) { return values_(p * components_ + k); }
  Complex operator()(Index p, int k = 0) const {
    return values_(p * components_ + k);
  }
  CVec at(Index p) const;
  const CVector& values() const { return values_; }
  CVector& values() { return values_; }

  /// Multilinear interpolation of nodal samples.
  CVec interpolate(const Vec& y) const;
  /// Nodal samples interpolated to the Gauss points.
  GridFunction to_quadrature() const;

  bool same_layout(const GridFunction& other) const;

 private:
  GridPtr grid_;
  Location where_ = Location::Nodes;
  int components_ = 1;
  CVector values_;
};

/// Sum over points of weight * conj(f) * g, optionally scaled by an extra
/// real weight per point (for example |J|).
Complex inner(const GridFunction& f, const GridFunction& g,
              const RVector* extra = nullptr);
double norm(const GridFunction& f, const RVector* extra = nullptr);

}  // namespace movdom
