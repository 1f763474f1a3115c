#include "movdom/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet:
      return "dirichlet";
    case BoundaryCondition::MagneticNeumann:
      return "magnetic-neumann";
    case BoundaryCondition::NaiveNeumann:
      return "naive-neumann";
  }
  return "unknown";
}

BoundaryCondition parse_boundary_condition(const std::string& name) {
  if (name == "dirichlet") return BoundaryCondition::Dirichlet;
  if (name == "magnetic-neumann") return BoundaryCondition::MagneticNeumann;
  if (name == "naive-neumann") return BoundaryCondition::NaiveNeumann;
  throw ConfigInvalid("unknown boundary condition '" + name +
                      "' (expected dirichlet, magnetic-neumann or naive-neumann)");
}

CVector DiscreteHamiltonian::to_dofs(const GridFunction& v) const {
  if (v.grid() != grid && (v.grid()->node_count() != grid->node_count())) {
    throw InvalidArgument("grid function does not match the Hamiltonian grid");
  }
  CVector z(size());
  for (Index k = 0; k < size(); ++k) z(k) = sqrt_weights(k) * v(dofs[k]);
  return z;
}

GridFunction DiscreteHamiltonian::from_dofs(const CVector& z) const {
  GridFunction v(grid, Location::Nodes, 1);
  for (Index k = 0; k < size(); ++k) v(dofs[k]) = z(k) / sqrt_weights(k);
  return v;
}

double DiscreteHamiltonian::scale() const {
  double m = 0.0;
  for (int c = 0; c < matrix.outerSize(); ++c) {
    for (SparseC::InnerIterator it(matrix, c); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

DiscreteHamiltonian empty_hamiltonian(const GridPtr& grid, BoundaryCondition bc) {
  DiscreteHamiltonian H;
  H.bc = bc;
  H.grid = grid;
  H.node_to_dof.assign(grid->node_count(), -1);
  for (Index i = 0; i < grid->node_count(); ++i) {
    if (bc == BoundaryCondition::Dirichlet && grid->on_boundary(i)) continue;
    H.node_to_dof[i] = static_cast<Index>(H.dofs.size());
    H.dofs.push_back(i);
  }
  H.sqrt_weights.resize(H.size());
  for (Index k = 0; k < H.size(); ++k) {
    H.sqrt_weights(k) = std::sqrt(grid->weights()(H.dofs[k]));
  }
  H.matrix.resize(H.size(), H.size());
  return H;
}

DiscreteHamiltonian assemble_hamiltonian(const DiffeoFamily& family,
                                         const GridPtr& grid,
                                         const CoefficientSet& coeffs, double t,
                                         BoundaryCondition bc) {
  if (family.dimension() != grid->dimension() ||
      coeffs.dimension != grid->dimension()) {
    throw InvalidArgument("family, coefficients and grid dimensions differ");
  }
  family.check_time(t);
  DiscreteHamiltonian H = empty_hamiltonian(grid, bc);
  H.time = t;
  const int dim = grid->dimension();
  const int nc = grid->nodes_per_cell();
  const double wq = grid->quadrature_weight();

  // Scaling s_i = 1 / sqrt(w_i |J_i|) of the similarity.
  RVector s(H.size());
  for (Index k = 0; k < H.size(); ++k) {
    const double det = jacobian_at(family, t, grid->node(H.dofs[k])).det;
    s(k) = 1.0 / std::sqrt(grid->weights()(H.dofs[k]) * det);
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(grid->cell_count()) * nc * nc +
               grid->boundary().size());
  Complex local[4][4];
  CVec T[4];
  for (Index c = 0; c < grid->cell_count(); ++c) {
    const auto nodes = grid->cell_nodes(c);
    for (auto& row : local) std::fill(std::begin(row), std::end(row), Complex(0.0));
    for (int lq = 0; lq < nc; ++lq) {
      const Vec y = grid->quadrature_point(c * nc + lq);
      const JacobianData jd = jacobian_at(family, t, y);
      const EffectiveValues e = effective_at(coeffs, family, t, y);
      const Mat G = e.D * jd.inverse_transpose;
      const double weight = wq * jd.det;
      for (int a = 0; a < nc; ++a) {
        const Vec g = G * grid->shape_gradient(a, lq);
        const double n = grid->shape(a, lq);
        T[a].resize(dim);
        for (int k = 0; k < dim; ++k) T[a](k) = Complex(g(k), e.A_tilde(k) * n);
      }
      for (int a = 0; a < nc; ++a) {
        for (int b = 0; b < nc; ++b) {
          Complex v = 0.0;
          for (int k = 0; k < dim; ++k) v += std::conj(T[a](k)) * T[b](k);
          v += e.V_tilde * grid->shape(a, lq) * grid->shape(b, lq);
          local[a][b] += weight * v;
        }
      }
    }
    for (int a = 0; a < nc; ++a) {
      const Index ra = H.node_to_dof[nodes[a]];
      if (ra < 0) continue;
      for (int b = 0; b < nc; ++b) {
        const Index cb = H.node_to_dof[nodes[b]];
        if (cb < 0) continue;
        trip.emplace_back(ra, cb, local[a][b]);
      }
    }
  }

  if (bc == BoundaryCondition::NaiveNeumann) {
    for (const BoundaryEntry& entry : grid->boundary()) {
      const Index k = H.node_to_dof[entry.node];
      const Vec y = grid->node(entry.node);
      const JacobianData jd = jacobian_at(family, t, y);
      const double flux =
          entry.normal.dot(jd.inverse * family.velocity(t, y));
      trip.emplace_back(k, k, Complex(0.0, 0.5 * entry.weight * jd.det * flux));
    }
  }

  SparseC K(H.size(), H.size());
  K.setFromTriplets(trip.begin(), trip.end());
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseC::InnerIterator it(K, col); it; ++it) {
      it.valueRef() *= s(it.row()) * s(it.col());
    }
  }
  H.matrix = std::move(K);
  return H;
}

Complex neumann_flux_coefficient(const DiffeoFamily& family, double t,
                                 const Vec& y, const Vec& normal0) {
  const JacobianData jd = jacobian_at(family, t, y);
  const Vec n = jd.inverse_transpose * normal0;
  const Vec nu = n / n.norm();
  return Complex(0.0, -0.5 * nu.dot(family.velocity(t, y)));
}

Complex neumann_flux_coefficient(const DiffeoFamily& family, double t,
                                 const ReferenceGrid& grid,
                                 const BoundaryEntry& entry) {
  return neumann_flux_coefficient(family, t, grid.node(entry.node), entry.normal);
}

double hermiticity_residual(const SparseC& H) {
  const SparseC diff = H - SparseC(H.adjoint());
  double worst = 0.0, scale = 0.0;
  for (int c = 0; c < diff.outerSize(); ++c) {
    for (SparseC::InnerIterator it(diff, c); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  for (int c = 0; c < H.outerSize(); ++c) {
    for (SparseC::InnerIterator it(H, c); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

double energy_of_dofs(const DiscreteHamiltonian& H, const CVector& z) {
  const CVector Hz = H.matrix * z;
  const Complex e = z.dot(Hz);
  if (is_hermitian(H.bc)) {
    const double scale = std::abs(e) + Hz.norm() * z.norm();
    if (std::abs(e.imag()) > 1e-10 * scale) {
      throw NonRealEnergy("energy has a non-negligible imaginary part");
    }
  }
  return e.real();
}

double energy_form(const DiscreteHamiltonian& H, const GridFunction& v) {
  return energy_of_dofs(H, H.to_dofs(v));
}

CoercivityBounds coercivity_bounds(const DiffeoFamily& family,
                                   const GridPtr& grid,
                                   const CoefficientSet& coeffs, double t) {
  CoercivityBounds b;
  b.gamma = 0.5 * coeffs.alpha;
  for (Index q = 0; q < grid->quadrature_count(); ++q) {
    const EffectiveValues e = effective_at(coeffs, family, t, grid->quadrature_point(q));
    b.kappa = std::max(b.kappa, e.A_tilde.squaredNorm() - e.V_tilde);
  }
  return b;
}

std::pair<double, double> quadrature_norms(const DiffeoFamily& family, double t,
                                           const GridFunction& v) {
  const GridFunction w = unsharpen(family, t, v);
  const GridFunction grad = pulled_gradient(family, t, w);
  const GridFunction wq = w.to_quadrature();
  const GridPtr& grid = v.grid();
  double g2 = 0.0, n2 = 0.0;
  for (Index q = 0; q < grid->quadrature_count(); ++q) {
    const double det = jacobian_at(family, t, grid->quadrature_point(q)).det;
    const double weight = grid->quadrature_weight() * det;
    g2 += weight * grad.at(q).squaredNorm();
    n2 += weight * std::norm(wq(q));
  }
  return {g2, n2};
}

}  // namespace movdom
