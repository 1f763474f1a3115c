#include "movdom/grid.hpp"

#include <algorithm>
#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

namespace {

const double kGauss2[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
const double kGauss3[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
const double kGauss3Weight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

Vec make_vec(int dim, double a, double b = 0.0) {
  Vec v(dim);
  v(0) = a;
  if (dim == 2) v(1) = b;
  return v;
}

}  // namespace

GridPtr ReferenceGrid::interval(double a, double b, int cells) {
  if (!(b > a) || cells < 2) {
    throw InvalidArgument("interval grid needs b > a and at least 2 cells");
  }
  return GridPtr(new ReferenceGrid(1, {a, 0.0}, {b, 0.0}, {cells, 0}));
}

GridPtr ReferenceGrid::rectangle(double x0, double x1, double y0, double y1,
                                 int nx, int ny) {
  if (!(x1 > x0) || !(y1 > y0) || nx < 2 || ny < 2) {
    throw InvalidArgument("rectangle grid needs positive extents and 2 cells");
  }
  return GridPtr(new ReferenceGrid(2, {x0, y0}, {x1, y1}, {nx, ny}));
}

GridPtr ReferenceGrid::unit(int dimension, int cells) {
  if (dimension == 1) return interval(0.0, 1.0, cells);
  if (dimension == 2) return rectangle(0.0, 1.0, 0.0, 1.0, cells, cells);
  throw InvalidArgument("grid dimension must be 1 or 2");
}

ReferenceGrid::ReferenceGrid(int dim, std::array<double, 2> lo,
                             std::array<double, 2> hi, std::array<int, 2> n)
    : dim_(dim), lo_(lo), hi_(hi), h_{0.0, 0.0}, n_(n) {
  for (int k = 0; k < dim_; ++k) h_[k] = (hi_[k] - lo_[k]) / n_[k];
  const Index px = points(0);
  const Index py = dim_ == 2 ? points(1) : 1;
  node_count_ = px * py;
  cell_count_ = static_cast<Index>(n_[0]) * (dim_ == 2 ? n_[1] : 1);
  cell_volume_ = dim_ == 2 ? h_[0] * h_[1] : h_[0];
  measure_ = dim_ == 2 ? (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]) : hi_[0] - lo_[0];

  weights_.resize(node_count_);
  boundary_mask_.assign(node_count_, 0);
  for (Index j = 0; j < py; ++j) {
    for (Index i = 0; i < px; ++i) {
      const bool edge_x = (i == 0 || i == px - 1);
      const bool edge_y = dim_ == 2 && (j == 0 || j == py - 1);
      double w = h_[0] * (edge_x ? 0.5 : 1.0);
      if (dim_ == 2) w *= h_[1] * (edge_y ? 0.5 : 1.0);
      const Index id = i + px * j;
      weights_(id) = w;
      if (edge_x || edge_y) boundary_mask_[id] = 1;
    }
  }
  for (Index id = 0; id < node_count_; ++id) {
    (boundary_mask_[id] ? boundary_nodes_ : interior_).push_back(id);
  }

  if (dim_ == 1) {
    boundary_.push_back({0, make_vec(1, -1.0), 1.0});
    boundary_.push_back({px - 1, make_vec(1, 1.0), 1.0});
  } else {
    auto edge_weight = [](Index k, Index count, double h) {
      return (k == 0 || k == count - 1) ? 0.5 * h : h;
    };
    for (Index i = 0; i < px; ++i) {
      boundary_.push_back({node_index(static_cast<int>(i), 0),
                           make_vec(2, 0.0, -1.0), edge_weight(i, px, h_[0])});
    }
    for (Index j = 0; j < py; ++j) {
      boundary_.push_back({node_index(static_cast<int>(px - 1), static_cast<int>(j)),
                           make_vec(2, 1.0, 0.0), edge_weight(j, py, h_[1])});
    }
    for (Index i = 0; i < px; ++i) {
      boundary_.push_back({node_index(static_cast<int>(i), static_cast<int>(py - 1)),
                           make_vec(2, 0.0, 1.0), edge_weight(i, px, h_[0])});
    }
    for (Index j = 0; j < py; ++j) {
      boundary_.push_back({node_index(0, static_cast<int>(j)),
                           make_vec(2, -1.0, 0.0), edge_weight(j, py, h_[1])});
    }
  }

  const int nc = nodes_per_cell();
  for (int lq = 0; lq < nc; ++lq) {
    const double xi = kGauss2[lq & 1];
    const double eta = kGauss2[(lq >> 1) & 1];
    for (int a = 0; a < nc; ++a) {
      const double fx = (a & 1) ? xi : 1.0 - xi;
      const double dfx = ((a & 1) ? 1.0 : -1.0) / h_[0];
      if (dim_ == 1) {
        shape_[a][lq] = fx;
        grad_[a][lq] = make_vec(1, dfx);
      } else {
        const double fy = (a & 2) ? eta : 1.0 - eta;
        const double dfy = ((a & 2) ? 1.0 : -1.0) / h_[1];
        shape_[a][lq] = fx * fy;
        grad_[a][lq] = make_vec(2, dfx * fy, fx * dfy);
      }
    }
  }
}

double ReferenceGrid::min_spacing() const {
  return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]);
}

double ReferenceGrid::max_spacing() const {
  return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]);
}

std::array<int, 2> ReferenceGrid::node_ij(Index node) const {
  const Index px = points(0);
  return {static_cast<int>(node % px), static_cast<int>(node / px)};
}

Vec ReferenceGrid::node(Index node) const {
  const auto ij = node_ij(node);
  // Pin the last node to the upper bound so boundary coordinates are exact.
  const double x = ij[0] == n_[0] ? hi_[0] : lo_[0] + ij[0] * h_[0];
  if (dim_ == 1) return make_vec(1, x);
  const double y = ij[1] == n_[1] ? hi_[1] : lo_[1] + ij[1] * h_[1];
  return make_vec(2, x, y);
}

std::array<int, 2> ReferenceGrid::cell_ij(Index cell) const {
  return {static_cast<int>(cell % n_[0]), static_cast<int>(cell / n_[0])};
}

std::array<Index, 4> ReferenceGrid::cell_nodes(Index cell) const {
  const auto ij = cell_ij(cell);
  const Index base = node_index(ij[0], ij[1]);
  if (dim_ == 1) return {base, base + 1, -1, -1};
  const Index px = points(0);
  return {base, base + 1, base + px, base + px + 1};
}

Vec ReferenceGrid::cell_center(Index cell) const {
  const auto ij = cell_ij(cell);
  return make_vec(dim_, lo_[0] + (ij[0] + 0.5) * h_[0],
                  lo_[1] + (ij[1] + 0.5) * h_[1]);
}

Vec ReferenceGrid::quadrature_point(Index q) const {
  const Index cell = q / points_per_cell();
  const int lq = static_cast<int>(q % points_per_cell());
  const auto ij = cell_ij(cell);
  return make_vec(dim_, lo_[0] + (ij[0] + kGauss2[lq & 1]) * h_[0],
                  lo_[1] + (ij[1] + kGauss2[(lq >> 1) & 1]) * h_[1]);
}

bool ReferenceGrid::contains(const Vec& y, double tol) const {
  for (int k = 0; k < dim_; ++k) {
    const double band = tol * h_[k];
    if (y(k) < lo_[k] - band || y(k) > hi_[k] + band) return false;
  }
  return true;
}

ReferenceGrid::Location ReferenceGrid::locate(const Vec& y, double tol) const {
  if (y.size() != dim_ || !contains(y, tol) || !y.allFinite()) {
    throw EvaluationOutsideDomain("point outside the reference domain");
  }
  Location loc{0, {0.0, 0.0}};
  std::array<int, 2> c{0, 0};
  for (int k = 0; k < dim_; ++k) {
    const double s = (y(k) - lo_[k]) / h_[k];
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, n_[k] - 1);
    c[k] = i;
    loc.local[k] = std::clamp(s - i, 0.0, 1.0);
  }
  loc.cell = cell_index(c[0], c[1]);
  return loc;
}

std::array<double, 4> ReferenceGrid::interpolation_weights(
    const Location& loc) const {
  const double x = loc.local[0];
  if (dim_ == 1) return {1.0 - x, x, 0.0, 0.0};
  const double y = loc.local[1];
  return {(1.0 - x) * (1.0 - y), x * (1.0 - y), (1.0 - x) * y, x * y};
}

std::array<Vec, 4> ReferenceGrid::interpolation_gradients(
    const Location& loc) const {
  const double x = loc.local[0];
  if (dim_ == 1) {
    return {make_vec(1, -1.0 / h_[0]), make_vec(1, 1.0 / h_[0]), Vec(), Vec()};
  }
  const double y = loc.local[1];
  const double ix = 1.0 / h_[0], iy = 1.0 / h_[1];
  return {make_vec(2, -(1.0 - y) * ix, -(1.0 - x) * iy),
          make_vec(2, (1.0 - y) * ix, -x * iy),
          make_vec(2, -y * ix, (1.0 - x) * iy), make_vec(2, y * ix, x * iy)};
}

RVector ReferenceGrid::cell_averages(
    const std::function<double(const Vec&)>& fn) const {
  RVector out(cell_count_);
  Vec p(dim_);
  for (Index c = 0; c < cell_count_; ++c) {
    const auto ij = cell_ij(c);
    double acc = 0.0;
    if (dim_ == 1) {
      for (int a = 0; a < 3; ++a) {
        p(0) = lo_[0] + (ij[0] + kGauss3[a]) * h_[0];
        acc += kGauss3Weight[a] * fn(p);
      }
    } else {
      for (int b = 0; b < 3; ++b) {
        for (int a = 0; a < 3; ++a) {
          p(0) = lo_[0] + (ij[0] + kGauss3[a]) * h_[0];
          p(1) = lo_[1] + (ij[1] + kGauss3[b]) * h_[1];
          acc += kGauss3Weight[a] * kGauss3Weight[b] * fn(p);
        }
      }
    }
    out(c) = acc;
  }
  return out;
}

}  // namespace movdom
