#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "movdom/grid.hpp"

namespace movdom {

/// Vector field on the faces of the cells of a ReferenceGrid (MAC layout).
/// Component k lives on the faces normal to axis k: at the nodes along
/// axis k and at the cell centres along the other axis. Values on the
/// walls are zero, both normal (stored) and tangential (implied).
class StaggeredField {
 public:
  StaggeredField() = default;
  explicit StaggeredField(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  int dimension() const { return grid_->dimension(); }

  /// Number of faces carrying component k, walls included.
  Index face_count(int k) const;
  Index face_index(int k, int i, int j = 0) const;
  double& face(int k, int i, int j = 0) { return comp_[k](face_index(k, i, j)); }
  double face(int k, int i, int j = 0) const {
    return comp_[k](face_index(k, i, j));
  }
  RVector& component(int k) { return comp_[k]; }
  const RVector& component(int k) const { return comp_[k]; }

  /// Cell divergence.
  RVector divergence() const;
  /// Gradient matrix per cell: exact face differences on the diagonal,
  /// centred differences of cell-centre averages off the diagonal.
  std::vector<Mat> cell_jacobians() const;
  /// Piecewise multilinear interpolant (zero on the boundary).
  Vec interpolate(const Vec& y) const;

  double max_abs() const;
  StaggeredField& operator+=(const StaggeredField& other);
  StaggeredField& operator*=(double s);
  /// Each interior face multiplied by the given per-cell values averaged
  /// over the two adjacent cells.
  void divide_by_cell_average(const RVector& cell_values);

 private:
  double extended(int k, int node_along, int ext_other) const;

  GridPtr grid_;
  std::array<RVector, 2> comp_;
};

/// Right inverse of the staggered divergence for mean-zero cell data v.
/// In 1D the unique antiderivative. In 2D the field of least discrete
/// Dirichlet energy with div u = v and u = 0 on the whole boundary
/// (tangential part included), from a factorized saddle-point system.
class DivergenceRightInverse {
 public:
  explicit DivergenceRightInverse(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  /// The mean of v is removed before solving.
  StaggeredField apply(const RVector& cell_values) const;
  Index unknowns() const { return static_cast<Index>(faces_.size()); }

 private:
  struct Face {
    int component;
    int i, j;
  };
  GridPtr grid_;
  std::vector<Face> faces_;
  SparseR B_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseR>> normal_;
  std::shared_ptr<Eigen::SparseLU<SparseR>> saddle_;
};

std::shared_ptr<const DivergenceRightInverse> build_divergence_right_inverse(
    const GridPtr& grid);

/// det(I + M) - 1 - Tr(M).
double q_residual(const Eigen::MatrixXd& M);

}  // namespace movdom
