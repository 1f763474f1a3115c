#include "movdom/staggered.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "movdom/errors.hpp"

namespace movdom {

namespace {

struct AxisHit {
  int index;
  double frac;
};

// Position along an axis of n cells whose samples sit on the nodes.
AxisHit locate_nodes(double s, int n) {
  s = std::clamp(s, 0.0, static_cast<double>(n));
  const int a = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
  return {a, s - a};
}

// Position along an axis of n cells whose samples sit on the cell centres,
// extended by the two walls: P(0) = 0, P(m) = m - 1/2, P(n + 1) = n.
AxisHit locate_centres(double r, int n) {
  r = std::clamp(r, 0.0, static_cast<double>(n));
  if (r < 0.5) return {0, r / 0.5};
  if (r >= n - 0.5) return {n, (r - (n - 0.5)) / 0.5};
  const int m = std::clamp(static_cast<int>(std::floor(r + 0.5)), 1, n - 1);
  return {m, r - (m - 0.5)};
}

}  // namespace

StaggeredField::StaggeredField(GridPtr grid) : grid_(std::move(grid)) {
  for (int k = 0; k < grid_->dimension(); ++k) {
    comp_[k] = RVector::Zero(face_count(k));
  }
}

Index StaggeredField::face_count(int k) const {
  if (dimension() == 1) return grid_->cells(0) + 1;
  const Index nx = grid_->cells(0), ny = grid_->cells(1);
  return k == 0 ? (nx + 1) * ny : nx * (ny + 1);
}

Index StaggeredField::face_index(int k, int i, int j) const {
  if (dimension() == 1) return i;
  const Index nx = grid_->cells(0);
  return k == 0 ? i + (nx + 1) * j : i + nx * j;
}

double StaggeredField::extended(int k, int node_along, int ext_other) const {
  const int other = 1 - k;
  const int n_other = grid_->cells(other);
  if (ext_other == 0 || ext_other == n_other + 1) return 0.0;
  return k == 0 ? face(0, node_along, ext_other - 1)
                : face(1, ext_other - 1, node_along);
}

RVector StaggeredField::divergence() const {
  RVector div(grid_->cell_count());
  const double h0 = grid_->spacing(0);
  if (dimension() == 1) {
    for (int i = 0; i < grid_->cells(0); ++i) {
      div(i) = (face(0, i + 1) - face(0, i)) / h0;
    }
    return div;
  }
  const double h1 = grid_->spacing(1);
  for (int j = 0; j < grid_->cells(1); ++j) {
    for (int i = 0; i < grid_->cells(0); ++i) {
      div(grid_->cell_index(i, j)) = (face(0, i + 1, j) - face(0, i, j)) / h0 +
                                     (face(1, i, j + 1) - face(1, i, j)) / h1;
    }
  }
  return div;
}

std::vector<Mat> StaggeredField::cell_jacobians() const {
  std::vector<Mat> out(grid_->cell_count());
  const double h0 = grid_->spacing(0);
  if (dimension() == 1) {
    for (int i = 0; i < grid_->cells(0); ++i) {
      out[i] = Mat::Constant(1, 1, (face(0, i + 1) - face(0, i)) / h0);
    }
    return out;
  }
  const int nx = grid_->cells(0), ny = grid_->cells(1);
  const double h1 = grid_->spacing(1);
  // Cell-centre values of each component.
  Eigen::MatrixXd c0(nx, ny), c1(nx, ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      c0(i, j) = 0.5 * (face(0, i, j) + face(0, i + 1, j));
      c1(i, j) = 0.5 * (face(1, i, j) + face(1, i, j + 1));
    }
  }
  // Second-order derivative at a cell centre from centre values, using
  // the zero wall value next to the boundary.
  auto centred = [](auto value, int m, int n, double h) {
    if (m == 0) return value(0) / h + value(1) / (3.0 * h);
    if (m == n - 1) return -(value(n - 1) / h + value(n - 2) / (3.0 * h));
    return (value(m + 1) - value(m - 1)) / (2.0 * h);
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Mat M(2, 2);
      M(0, 0) = (face(0, i + 1, j) - face(0, i, j)) / h0;
      M(1, 1) = (face(1, i, j + 1) - face(1, i, j)) / h1;
      M(0, 1) = centred([&](int m) { return c0(i, m); }, j, ny, h1);
      M(1, 0) = centred([&](int m) { return c1(m, j); }, i, nx, h0);
      out[grid_->cell_index(i, j)] = M;
    }
  }
  return out;
}

Vec StaggeredField::interpolate(const Vec& y) const {
  Vec out(dimension());
  const double s0 = (y(0) - grid_->lower(0)) / grid_->spacing(0);
  if (dimension() == 1) {
    const AxisHit a = locate_nodes(s0, grid_->cells(0));
    out(0) = (1.0 - a.frac) * face(0, a.index) + a.frac * face(0, a.index + 1);
    return out;
  }
  const double s1 = (y(1) - grid_->lower(1)) / grid_->spacing(1);
  const double s[2] = {s0, s1};
  for (int k = 0; k < 2; ++k) {
    const int o = 1 - k;
    const AxisHit a = locate_nodes(s[k], grid_->cells(k));
    const AxisHit m = locate_centres(s[o], grid_->cells(o));
    const double v00 = extended(k, a.index, m.index);
    const double v10 = extended(k, a.index + 1, m.index);
    const double v01 = extended(k, a.index, m.index + 1);
    const double v11 = extended(k, a.index + 1, m.index + 1);
    out(k) = (1.0 - a.frac) * ((1.0 - m.frac) * v00 + m.frac * v01) +
             a.frac * ((1.0 - m.frac) * v10 + m.frac * v11);
  }
  return out;
}

double StaggeredField::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < dimension(); ++k) {
    if (comp_[k].size()) m = std::max(m, comp_[k].cwiseAbs().maxCoeff());
  }
  return m;
}

StaggeredField& StaggeredField::operator+=(const StaggeredField& other) {
  for (int k = 0; k < dimension(); ++k) comp_[k] += other.comp_[k];
  return *this;
}

StaggeredField& StaggeredField::operator*=(double s) {
  for (int k = 0; k < dimension(); ++k) comp_[k] *= s;
  return *this;
}

void StaggeredField::divide_by_cell_average(const RVector& cell_values) {
  if (dimension() == 1) {
    for (int i = 1; i < grid_->cells(0); ++i) {
      face(0, i) /= 0.5 * (cell_values(i - 1) + cell_values(i));
    }
    return;
  }
  const int nx = grid_->cells(0), ny = grid_->cells(1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      face(0, i, j) /= 0.5 * (cell_values(grid_->cell_index(i - 1, j)) +
                              cell_values(grid_->cell_index(i, j)));
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      face(1, i, j) /= 0.5 * (cell_values(grid_->cell_index(i, j - 1)) +
                              cell_values(grid_->cell_index(i, j)));
    }
  }
}

DivergenceRightInverse::DivergenceRightInverse(GridPtr grid)
    : grid_(std::move(grid)) {
  const int dim = grid_->dimension();
  const int nx = grid_->cells(0);
  const int ny = dim == 2 ? grid_->cells(1) : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) faces_.push_back({0, i, j});
  }
  if (dim == 2) {
    for (int j = 1; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) faces_.push_back({1, i, j});
    }
  }
  const Index cells = grid_->cell_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = faces_[f];
    const double inv_h = 1.0 / grid_->spacing(face.component);
    Index left, right;
    if (face.component == 0) {
      left = grid_->cell_index(face.i - 1, dim == 2 ? face.j : 0);
      right = grid_->cell_index(face.i, dim == 2 ? face.j : 0);
    } else {
      left = grid_->cell_index(face.i, face.j - 1);
      right = grid_->cell_index(face.i, face.j);
    }
    trip.emplace_back(left, static_cast<Index>(f), inv_h);
    trip.emplace_back(right, static_cast<Index>(f), -inv_h);
  }
  B_.resize(cells, static_cast<Index>(faces_.size()));
  B_.setFromTriplets(trip.begin(), trip.end());

  // Pin the first cell: its row is implied by the others.
  std::vector<Eigen::Triplet<double>> pinned;
  for (const auto& t : trip) {
    if (t.row() > 0) pinned.emplace_back(t.row() - 1, t.col(), t.value());
  }
  const Index nf = static_cast<Index>(faces_.size());
  if (dim == 1) {
    SparseR B1(cells - 1, nf);
    B1.setFromTriplets(pinned.begin(), pinned.end());
    const SparseR normal = B1 * SparseR(B1.transpose());
    normal_ = std::make_shared<Eigen::SimplicialLDLT<SparseR>>();
    normal_->compute(normal);
    if (normal_->info() != Eigen::Success) {
      throw SingularSystem("divergence normal equations could not be factorized");
    }
    return;
  }

  // Saddle system [A B1^t; B1 0] with A the no-slip MAC vector Laplacian.
  std::vector<Index> lookup[2];
  lookup[0].assign(static_cast<std::size_t>((nx + 1) * ny), -1);
  lookup[1].assign(static_cast<std::size_t>(nx * (ny + 1)), -1);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& fc = faces_[f];
    const Index idx = fc.component == 0 ? fc.i + (nx + 1) * fc.j : fc.i + nx * fc.j;
    lookup[fc.component][idx] = static_cast<Index>(f);
  }
  auto find = [&](int k, int i, int j) -> Index {
    if (k == 0) {
      if (i < 1 || i > nx - 1 || j < 0 || j > ny - 1) return -1;
      return lookup[0][i + (nx + 1) * j];
    }
    if (i < 0 || i > nx - 1 || j < 1 || j > ny - 1) return -1;
    return lookup[1][i + nx * j];
  };
  std::vector<Eigen::Triplet<double>> kt;
  kt.reserve(5 * faces_.size() + 4 * pinned.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& fc = faces_[f];
    const Index row = static_cast<Index>(f);
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const double w = 1.0 / (grid_->spacing(axis) * grid_->spacing(axis));
      for (int side : {-1, 1}) {
        const int i = fc.i + (axis == 0 ? side : 0);
        const int j = fc.j + (axis == 1 ? side : 0);
        const Index col = find(fc.component, i, j);
        diag += w;
        if (col >= 0) {
          kt.emplace_back(row, col, -w);
        } else if (axis != fc.component) {
          diag += w;  // tangential wall: ghost value -u
        }
      }
    }
    kt.emplace_back(row, row, diag);
  }
  for (const auto& t : pinned) {
    kt.emplace_back(nf + t.row(), t.col(), t.value());
    kt.emplace_back(t.col(), nf + t.row(), t.value());
  }
  SparseR K(nf + cells - 1, nf + cells - 1);
  K.setFromTriplets(kt.begin(), kt.end());
  saddle_ = std::make_shared<Eigen::SparseLU<SparseR>>();
  saddle_->analyzePattern(K);
  saddle_->factorize(K);
  if (saddle_->info() != Eigen::Success) {
    throw SingularSystem("divergence saddle system could not be factorized");
  }
}

StaggeredField DivergenceRightInverse::apply(const RVector& cell_values) const {
  const Index cells = grid_->cell_count();
  if (cell_values.size() != cells) {
    throw InvalidArgument("right inverse needs one value per cell");
  }
  const RVector v = cell_values.array() - cell_values.mean();
  const Index nf = static_cast<Index>(faces_.size());
  RVector u;
  if (normal_) {
    RVector p = RVector::Zero(cells);
    p.tail(cells - 1) = normal_->solve(v.tail(cells - 1));
    if (normal_->info() != Eigen::Success) {
      throw SingularSystem("divergence normal equations solve failed");
    }
    u = B_.transpose() * p;
  } else {
    RVector rhs = RVector::Zero(nf + cells - 1);
    rhs.tail(cells - 1) = v.tail(cells - 1);
    const RVector x = saddle_->solve(rhs);
    if (saddle_->info() != Eigen::Success) {
      throw SingularSystem("divergence saddle system solve failed");
    }
    u = x.head(nf);
  }
  StaggeredField out(grid_);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    out.face(faces_[f].component, faces_[f].i, faces_[f].j) = u(static_cast<Index>(f));
  }
  return out;
}

std::shared_ptr<const DivergenceRightInverse> build_divergence_right_inverse(
    const GridPtr& grid) {
  return std::make_shared<const DivergenceRightInverse>(grid);
}

double q_residual(const Eigen::MatrixXd& M) {
  const Index n = M.rows();
  if (M.cols() != n) throw InvalidArgument("q_residual needs a square matrix");
  if (n <= 1) return 0.0;
  if (n == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (n == 3) {
    // Sum of principal 2x2 minors plus det(M).
    const double e2 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) +
                      M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0) +
                      M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    return e2 + M.determinant();
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  return (I + M).determinant() - 1.0 - M.trace();
}

}  // namespace movdom
