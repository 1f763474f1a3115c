#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "movdom/types.hpp"

namespace movdom {

/// One boundary node seen from one boundary edge. Corner nodes of a
/// rectangle appear once per adjacent edge.
struct BoundaryEntry {
  Index node;
  Vec normal;     // outward unit normal on the reference domain
  double weight;  // trapezoid weight of the boundary measure
};

class ReferenceGrid;
using GridPtr = std::shared_ptr<const ReferenceGrid>;

/// Uniform tensor grid on an interval or a rectangle. Nodes include the
/// boundary. Node (i, j) has index i + (nx + 1) j.
///
/// Cells carry a 2-point Gauss rule per axis; lumped (trapezoid) weights
/// live on the nodes.
class ReferenceGrid {
 public:
  static GridPtr interval(double a, double b, int cells);
  static GridPtr rectangle(double x0, double x1, double y0, double y1, int nx,
                           int ny);
  static GridPtr unit(int dimension, int cells);

  int dimension() const { return dim_; }
  int cells(int axis) const { return n_[axis]; }
  int points(int axis) const { return n_[axis] + 1; }
  double lower(int axis) const { return lo_[axis]; }
  double upper(int axis) const { return hi_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  double max_spacing() const;

  Index node_count() const { return node_count_; }
  Index cell_count() const { return cell_count_; }
  Index node_index(int i, int j = 0) const {
    return static_cast<Index>(i) + static_cast<Index>(points(0)) * j;
  }
  std::array<int, 2> node_ij(Index node) const;
  Vec node(Index node) const;

  /// Trapezoid weights; they sum to the measure of the domain.
  const RVector& weights() const { return weights_; }
  double measure() const { return measure_; }

  const std::vector<BoundaryEntry>& boundary() const { return boundary_; }
  bool on_boundary(Index node) const { return boundary_mask_[node] != 0; }
  const std::vector<Index>& interior_nodes() const { return interior_; }
  const std::vector<Index>& boundary_nodes() const { return boundary_nodes_; }

  int nodes_per_cell() const { return dim_ == 1 ? 2 : 4; }
  std::array<Index, 4> cell_nodes(Index cell) const;
  std::array<int, 2> cell_ij(Index cell) const;
  Index cell_index(int i, int j = 0) const {
    return static_cast<Index>(i) + static_cast<Index>(n_[0]) * j;
  }
  Vec cell_center(Index cell) const;
  double cell_volume() const { return cell_volume_; }

  int points_per_cell() const { return nodes_per_cell(); }
  Index quadrature_count() const { return cell_count_ * points_per_cell(); }
  Index quadrature_cell(Index q) const { return q / points_per_cell(); }
  Vec quadrature_point(Index q) const;
  double quadrature_weight() const { return cell_volume_ / points_per_cell(); }

  /// Bilinear (or linear) shape function a of a cell evaluated at local
  /// quadrature point lq, and its gradient in length units.
  double shape(int a, int lq) const { return shape_[a][lq]; }
  const Vec& shape_gradient(int a, int lq) const { return grad_[a][lq]; }

  struct Location {
    Index cell;
    std::array<double, 2> local;  // coordinates in [0, 1] within the cell
  };
  /// Cell containing y. Points outside by more than tol (relative to the
  /// spacing) raise EvaluationOutsideDomain; closer ones are clamped.
  Location locate(const Vec& y, double tol = 1e-9) const;
  bool contains(const Vec& y, double tol = 1e-9) const;
  /// Weights of the cell's nodes for the multilinear interpolant at a
  /// located point, and their gradients.
  std::array<double, 4> interpolation_weights(const Location& loc) const;
  std::array<Vec, 4> interpolation_gradients(const Location& loc) const;

  /// Average of fn over each cell with a 3-point Gauss rule per axis.
  RVector cell_averages(const std::function<double(const Vec&)>& fn) const;

 private:
  ReferenceGrid(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                std::array<int, 2> n);

  int dim_;
  std::array<double, 2> lo_, hi_, h_;
  std::array<int, 2> n_;
  Index node_count_ = 0;
  Index cell_count_ = 0;
  double cell_volume_ = 0.0;
  double measure_ = 0.0;
  RVector weights_;
  std::vector<BoundaryEntry> boundary_;
  std::vector<char> boundary_mask_;
  std::vector<Index> interior_;
  std::vector<Index> boundary_nodes_;
  std::array<std::array<double, 4>, 4> shape_{};
  std::array<std::array<Vec, 4>, 4> grad_;
};

}  // namespace movdom
