#pragma once

#include <string>
#include <vector>

#include "movdom/calculus.hpp"
#include "movdom/coefficients.hpp"

namespace movdom {

enum class BoundaryCondition { Dirichlet, MagneticNeumann, NaiveNeumann };

std::string to_string(BoundaryCondition bc);
/// Accepts dirichlet, magnetic-neumann and naive-neumann.
BoundaryCondition parse_boundary_condition(const std::string& name);
inline bool is_hermitian(BoundaryCondition bc) {
  return bc != BoundaryCondition::NaiveNeumann;
}

/// The conjugated Hamiltonian h# H~ h#^{-1} at one time, acting on the
/// coordinates z_i = sqrt(w_i) v_i of the degrees of freedom.
struct DiscreteHamiltonian {
  SparseC matrix;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double time = 0.0;
  GridPtr grid;
  std::vector<Index> dofs;         // node of each degree of freedom
  std::vector<Index> node_to_dof;  // -1 for eliminated nodes
  RVector sqrt_weights;            // per degree of freedom

  Index size() const { return static_cast<Index>(dofs.size()); }
  /// v (nodal, already carrying sqrt|J|) -> z.
  CVector to_dofs(const GridFunction& v) const;
  GridFunction from_dofs(const CVector& z) const;
  /// Largest entry modulus.
  double scale() const;
};

/// Degree-of-freedom layout for a boundary condition without assembling.
DiscreteHamiltonian empty_hamiltonian(const GridPtr& grid, BoundaryCondition bc);

/// Form-based assembly with bilinear (linear in 1D) elements and a 2-point
/// Gauss rule per axis:
///   q(w) = sum_q w_q |J_q| ( |D J^{-t} grad w + i A~ w|^2 + V~ |w|^2 ),
/// then conjugated by diag(sqrt(w_i |J_i|)). Magnetic Neumann is the natural
/// condition of the form; naive Neumann adds the boundary term that cancels
/// the motion-induced flux.
DiscreteHamiltonian assemble_hamiltonian(const DiffeoFamily& family,
                                         const GridPtr& grid,
                                         const CoefficientSet& coeffs, double t,
                                         BoundaryCondition bc);

/// -(i/2) <nu, h_* d/dt h> at a boundary entry, nu the unit normal of the
/// moving domain.
Complex neumann_flux_coefficient(const DiffeoFamily& family, double t,
                                 const ReferenceGrid& grid,
                                 const BoundaryEntry& entry);
Complex neumann_flux_coefficient(const DiffeoFamily& family, double t,
                                 const Vec& y, const Vec& normal0);

/// max |H - H^*| / max |H|.
double hermiticity_residual(const SparseC& H);

/// <Hv, v>. Throws NonRealEnergy when a Hermitian realization gives a
/// complex value; for naive Neumann the real part is returned.
double energy_form(const DiscreteHamiltonian& H, const GridFunction& v);
double energy_of_dofs(const DiscreteHamiltonian& H, const CVector& z);

/// Constants with q(w) >= gamma |grad w|^2 - kappa |w|^2 on the grid.
struct CoercivityBounds {
  double gamma = 0.0;
  double kappa = 0.0;
};
CoercivityBounds coercivity_bounds(const DiffeoFamily& family,
                                   const GridPtr& grid,
                                   const CoefficientSet& coeffs, double t);
/// Squared L2 norms on the moving domain of grad u and u, with u = w o h^{-1}
/// and w = v / sqrt|J|, using the Gauss rule of the assembly.
std::pair<double, double> quadrature_norms(const DiffeoFamily& family, double t,
                                           const GridFunction& v);

}  // namespace movdom
