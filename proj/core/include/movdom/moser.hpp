#pragma once

#include <limits>
#include <string>
#include <vector>

#include "movdom/density.hpp"
#include "movdom/diffeo.hpp"
#include "movdom/staggered.hpp"

namespace movdom {

/// A diffeomorphism of the reference domain sampled at the grid nodes
/// together with its inverse. Between nodes both are multilinear.
struct MoserMap {
  double time = 0.0;
  GridPtr grid;
  std::vector<Vec> forward;
  std::vector<Vec> inverse;
  RVector det;     // per cell, area ratio of the image of the cell
  RVector target;  // prescribed density, per cell average
  double residual = 0.0;  // max |det - target|
  double raw_residual = 0.0;  // before the final node correction
  /// max |det(D psi) f(psi) - 1| for the flow method, NaN otherwise.
  double flow_identity_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::vector<double> increments;  // fixed-point step sizes
  std::string method;

  Vec apply(const Vec& y) const;
  Vec apply_inverse(const Vec& x) const;
};

struct MoserOptions {
  double tol = 1e-10;  // fixed-point increment tolerance
  int max_iter = 100;
  double contraction_bound = 0.1;
  double smoothing = 0.0;  // Gaussian width, 0 selects twice the spacing
  int retries = 3;
  int min_steps = 200;     // RK4 steps over the whole flow path
};

/// Node coordinates as a map.
std::vector<Vec> nodal_identity(const ReferenceGrid& grid);
Vec q1_interpolate(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
                   const Vec& y);
Mat q1_gradient(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
                const Vec& y);
/// Newton solve of Phi(y) = x for the multilinear interpolant Phi.
Vec q1_invert(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
              const Vec& x, const Vec& seed, double tol = 1e-10);
/// Area (length) of the image of each cell divided by the cell volume.
RVector q1_cell_determinants(const ReferenceGrid& grid,
                             const std::vector<Vec>& nodal);
/// Average of fn over the image of each cell under the nodal map, divided
/// by the cell volume.
RVector image_cell_integrals(const ReferenceGrid& grid,
                             const std::vector<Vec>& nodal,
                             const std::function<double(const Vec&)>& fn);

/// Gauss-Newton correction of the interior nodes so that the measure of
/// each image cell (weighted by weight when given) divided by the cell
/// volume matches target. The boundary nodes do not move. Returns the
/// final max residual after removing its mean.
double polish_cell_measures(const ReferenceGrid& grid, std::vector<Vec>& nodal,
                            const RVector& target,
                            const std::function<double(const Vec&)>& weight = {},
                            int max_iter = 8);

/// Cached per grid.
std::shared_ptr<const DivergenceRightInverse> cached_right_inverse(
    const GridPtr& grid);

std::vector<MoserMap> moser_flow(const DensityFamily& f, const GridPtr& grid,
                                 const std::vector<double>& time_samples,
                                 const MoserOptions& options = {});

MoserMap moser_fixed_point(const RVector& f_cells, const GridPtr& grid,
                           const MoserOptions& options = {}, double time = 0.0);
MoserMap moser_fixed_point(const DensityFamily& f, const GridPtr& grid,
                           double time, const MoserOptions& options = {});

std::vector<MoserMap> moser_combined(const DensityFamily& f,
                                     const GridPtr& grid,
                                     const std::vector<double>& time_samples,
                                     const MoserOptions& options = {});

struct NormalizedDiffeo {
  /// h o phi^{-1}; evaluable only at the sample times.
  DiffeoFamily family;
  std::vector<double> times;
  std::vector<MoserMap> maps;
  std::vector<double> volume_ratio;        // meas(Omega(t)) / meas(Omega0)
  std::vector<std::vector<Vec>> nodes;     // h~ at the nodes
  std::vector<RVector> det;                // cell averages of det D h~
  std::vector<double> relative_residual;   // max |det - ratio| / ratio
};

NormalizedDiffeo normalize_diffeo(const DiffeoFamily& h, const GridPtr& grid,
                                  const std::vector<double>& time_samples,
                                  const MoserOptions& options = {});

}  // namespace movdom
