#pragma once

#include <Eigen/Dense>

#include "movdom/hamiltonian.hpp"

namespace movdom {

struct Eigenpairs {
  RVector values;           // ascending
  Eigen::MatrixXcd vectors; // unit columns, largest entry real positive
};

/// The count lowest eigenpairs of a Hermitian matrix. Dense solver for small
/// sizes, shift-invert subspace iteration otherwise.
Eigenpairs lowest_eigenpairs(const SparseC& H, int count, double tol = 1e-12);

struct SpectralProjector {
  int branch = 0;
  double eigenvalue = 0.0;
  CVector eigenvector;  // in degree-of-freedom coordinates
  double gap = 0.0;     // distance to the nearest other eigenvalue

  /// u -> <phi, u> phi
  CVector apply(const CVector& z) const;
  /// |<phi, z>|^2
  double overlap(const CVector& z) const;
};

/// Throws DegenerateBranch when the branch is closer than
/// gap_floor * max(1, |lambda|) to a neighbour.
SpectralProjector spectral_projector(const DiscreteHamiltonian& H, int k,
                                     double gap_floor = 1e-6);

}  // namespace movdom
