#include "movdom/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "movdom/errors.hpp"

namespace movdom {

namespace {

constexpr Index kDenseLimit = 1200;

void normalize_phase(Eigen::MatrixXcd& V) {
  for (Index c = 0; c < V.cols(); ++c) {
    Index arg = 0;
    V.col(c).cwiseAbs().maxCoeff(&arg);
    const Complex p = V(arg, c);
    if (std::abs(p) > 0.0) V.col(c) *= std::conj(p) / std::abs(p);
    V.col(c).normalize();
  }
}

Eigenpairs dense_eigenpairs(const SparseC& H, int count) {
  const Eigen::MatrixXcd dense(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) {
    throw NoConvergence("dense Hermitian eigensolver", 0);
  }
  Eigenpairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  normalize_phase(out.vectors);
  return out;
}

// Subspace iteration with (H - sigma)^{-1}, sigma below the spectrum.
Eigenpairs subspace_eigenpairs(const SparseC& H, int count, double tol) {
  const Index n = H.rows();
  double lower = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  RVector radius = RVector::Zero(n);
  RVector diag = RVector::Zero(n);
  for (int c = 0; c < H.outerSize(); ++c) {
    for (SparseC::InnerIterator it(H, c); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
      if (it.row() == it.col()) {
        diag(it.row()) = it.value().real();
      } else {
        radius(it.row()) += std::abs(it.value());
      }
    }
  }
  for (Index i = 0; i < n; ++i) lower = std::min(lower, diag(i) - radius(i));
  const double sigma = lower - 1e-3 * std::max(1.0, scale);

  SparseC shifted = H;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<SparseC> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw SingularSystem("shifted Hamiltonian could not be factorized");
  }

  const Index p = std::min<Index>(n, std::max(2 * count + 8, count + 10));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd X(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) X(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigenpairs out;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 2000; ++it) {
    const Eigen::MatrixXcd Y = solver.solve(X);
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
    const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, p);
    const Eigen::MatrixXcd HQ = H * Q;
    Eigen::MatrixXcd small = Q.adjoint() * HQ;
    small = 0.5 * (small + small.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(small);
    X = Q * es.eigenvectors();
    const Eigen::MatrixXcd HX = HQ * es.eigenvectors();
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
      worst = std::max(worst,
                       (HX.col(k) - es.eigenvalues()(k) * X.col(k)).norm());
    }
    if (worst <= tol * scale || (it > 50 && worst >= 0.999 * best && worst <= 1e3 * tol * scale)) {
      out.values = es.eigenvalues().head(count);
      out.vectors = X.leftCols(count);
      normalize_phase(out.vectors);
      return out;
    }
    best = std::min(best, worst);
  }
  throw NoConvergence("subspace iteration", 2000);
}

}  // namespace

Eigenpairs lowest_eigenpairs(const SparseC& H, int count, double tol) {
  if (H.rows() != H.cols() || count < 1 || count > H.rows()) {
    throw InvalidArgument("invalid eigenpair request");
  }
  if (H.rows() <= kDenseLimit) return dense_eigenpairs(H, count);
  return subspace_eigenpairs(H, count, tol);
}

CVector SpectralProjector::apply(const CVector& z) const {
  return eigenvector.dot(z) * eigenvector;
}

double SpectralProjector::overlap(const CVector& z) const {
  return std::norm(eigenvector.dot(z));
}

SpectralProjector spectral_projector(const DiscreteHamiltonian& H, int k,
                                     double gap_floor) {
  if (k < 0) throw InvalidArgument("branch index must be non-negative");
  const int count = static_cast<int>(std::min<Index>(H.size(), k + 2));
  const Eigenpairs pairs = lowest_eigenpairs(H.matrix, count);
  SpectralProjector P;
  P.branch = k;
  P.eigenvalue = pairs.values(k);
  P.eigenvector = pairs.vectors.col(k);
  double gap = std::numeric_limits<double>::infinity();
  if (k > 0) gap = std::min(gap, pairs.values(k) - pairs.values(k - 1));
  if (k + 1 < count) gap = std::min(gap, pairs.values(k + 1) - pairs.values(k));
  P.gap = gap;
  if (gap < gap_floor * std::max(1.0, std::abs(P.eigenvalue))) {
    throw DegenerateBranch(H.time, gap);
  }
  return P;
}

}  // namespace movdom
