#include "movdom/moser.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/LU>

#include "movdom/calculus.hpp"
#include "movdom/errors.hpp"

namespace movdom {

namespace {

const double kGauss3[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
const double kGauss3Weight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double max_deviation_from_one(const RVector& f) {
  return (f.array() - 1.0).abs().maxCoeff();
}

void pin_boundary(const ReferenceGrid& grid, std::vector<Vec>& nodal) {
  for (Index b : grid.boundary_nodes()) nodal[b] = grid.node(b);
}

Vec clamp_to_domain(const ReferenceGrid& grid, const Vec& p) {
  const double band = 1e-2 * grid.min_spacing();
  Vec q = p;
  for (int k = 0; k < grid.dimension(); ++k) {
    if (q(k) < grid.lower(k) - band || q(k) > grid.upper(k) + band ||
        !std::isfinite(q(k))) {
      throw FlowLeftDomain("flow trajectory left the reference domain");
    }
    q(k) = std::clamp(q(k), grid.lower(k), grid.upper(k));
  }
  return q;
}

// Separable Gaussian smoothing of cell data with mirrored boundaries.
RVector smooth_cells(const ReferenceGrid& grid, const RVector& v, double width) {
  if (!(width > 0.0)) return v;
  RVector out = v;
  const int dim = grid.dimension();
  for (int axis = 0; axis < dim; ++axis) {
    const double h = grid.spacing(axis);
    const int n = grid.cells(axis);
    const int r = std::max(1, static_cast<int>(std::ceil(4.0 * width / h)));
    std::vector<double> w(2 * r + 1);
    double total = 0.0;
    for (int k = -r; k <= r; ++k) {
      const double x = k * h / width;
      w[k + r] = std::exp(-0.5 * x * x);
      total += w[k + r];
    }
    for (double& x : w) x /= total;
    auto mirror = [n](int i) {
      while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
      return i;
    };
    const RVector in = out;
    const int lines = dim == 1 ? 1 : grid.cells(1 - axis);
    for (int line = 0; line < lines; ++line) {
      auto index = [&](int i) {
        if (dim == 1) return grid.cell_index(i);
        return axis == 0 ? grid.cell_index(i, line) : grid.cell_index(line, i);
      };
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) acc += w[k + r] * in(index(mirror(i + k)));
        out(index(i)) = acc;
      }
    }
  }
  return out;
}

// Density path s -> F(s) on cells, parametrized over [0, end].
struct FlowPath {
  std::function<RVector(double)> density;
  std::function<RVector(double)> rate;
  double end = 0.0;
  std::vector<double> sample_params;
};

struct FlowOutput {
  std::vector<std::vector<Vec>> phi;  // backward integration per sample
  std::vector<std::vector<Vec>> psi;  // forward flow per sample
};

StaggeredField velocity_field(const DivergenceRightInverse& linv,
                              const FlowPath& path, double s) {
  const RVector F = path.density(s);
  if (!(F.minCoeff() > 0.0)) {
    throw NonPositiveDensity("density path is not positive");
  }
  StaggeredField U = linv.apply(path.rate(s));
  U.divide_by_cell_average(F);
  U *= -1.0;
  return U;
}

FlowOutput integrate_flow(const GridPtr& grid, const DivergenceRightInverse& linv,
                          const FlowPath& path, int min_steps) {
  // Parameter grid hitting every sample.
  std::vector<double> breaks{0.0};
  for (double s : path.sample_params) breaks.push_back(s);
  breaks.push_back(path.end);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               breaks.end());
  const int target = std::max(min_steps, 4 * static_cast<int>(path.sample_params.size()));
  const double step = path.end > 0.0 ? path.end / target : 1.0;
  std::vector<double> s{0.0};
  for (std::size_t b = 1; b < breaks.size(); ++b) {
    const double len = breaks[b] - breaks[b - 1];
    const int m = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
    for (int k = 1; k <= m; ++k) {
      s.push_back(k == m ? breaks[b] : breaks[b - 1] + len * k / m);
    }
  }
  const std::size_t steps = s.size() - 1;
  std::vector<StaggeredField> U_at(s.size()), U_mid(steps);
  for (std::size_t k = 0; k < s.size(); ++k) U_at[k] = velocity_field(linv, path, s[k]);
  for (std::size_t k = 0; k < steps; ++k) {
    U_mid[k] = velocity_field(linv, path, 0.5 * (s[k] + s[k + 1]));
  }
  auto sample_position = [&](double param) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (std::abs(s[k] - param) < std::abs(s[best] - param)) best = k;
    }
    return best;
  };

  const std::vector<Vec> start = nodal_identity(*grid);
  const std::size_t nodes = start.size();
  auto rk4 = [&](std::vector<Vec>& X, std::size_t k, double sign) {
    const double dt = sign * (s[k + 1] - s[k]);
    const StaggeredField& Ua = sign > 0 ? U_at[k] : U_at[k + 1];
    const StaggeredField& Ub = sign > 0 ? U_at[k + 1] : U_at[k];
    const StaggeredField& Um = U_mid[k];
    for (std::size_t i = 0; i < nodes; ++i) {
      const Vec x = X[i];
      const Vec k1 = Ua.interpolate(x);
      const Vec k2 = Um.interpolate(clamp_to_domain(*grid, x + 0.5 * dt * k1));
      const Vec k3 = Um.interpolate(clamp_to_domain(*grid, x + 0.5 * dt * k2));
      const Vec k4 = Ub.interpolate(clamp_to_domain(*grid, x + dt * k3));
      X[i] = clamp_to_domain(*grid, x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
  };

  FlowOutput out;
  std::vector<std::size_t> sample_index;
  for (double p : path.sample_params) sample_index.push_back(sample_position(p));

  std::vector<Vec> X = start;
  std::map<std::size_t, std::vector<Vec>> forward;
  auto wanted = [&](std::size_t k) {
    return std::find(sample_index.begin(), sample_index.end(), k) != sample_index.end();
  };
  if (wanted(0)) forward[0] = X;
  for (std::size_t k = 0; k < steps; ++k) {
    rk4(X, k, 1.0);
    if (wanted(k + 1)) forward[k + 1] = X;
  }
  for (std::size_t idx : sample_index) {
    std::vector<Vec> psi = forward[idx];
    std::vector<Vec> phi = start;
    for (std::size_t k = idx; k-- > 0;) rk4(phi, k, -1.0);
    pin_boundary(*grid, psi);
    pin_boundary(*grid, phi);
    out.psi.push_back(std::move(psi));
    out.phi.push_back(std::move(phi));
  }
  return out;
}

MoserMap finish_map(const GridPtr& grid, double t, std::vector<Vec> forward,
                    std::vector<Vec> inverse, const RVector& target,
                    std::string method) {
  MoserMap m;
  m.time = t;
  m.grid = grid;
  pin_boundary(*grid, forward);
  pin_boundary(*grid, inverse);
  m.raw_residual = (q1_cell_determinants(*grid, forward) - target).cwiseAbs().maxCoeff();
  polish_cell_measures(*grid, forward, target);
  for (Index i : grid->interior_nodes()) {
    inverse[i] = q1_invert(*grid, forward, grid->node(i), inverse[i]);
  }
  m.forward = std::move(forward);
  m.inverse = std::move(inverse);
  m.det = q1_cell_determinants(*grid, m.forward);
  if (!(m.det.minCoeff() > 0.0)) {
    throw DegenerateJacobian(t, m.det.minCoeff(), "in a constructed map");
  }
  m.target = target;
  m.residual = (m.det - target).cwiseAbs().maxCoeff();
  m.method = std::move(method);
  return m;
}

void check_sorted(const std::vector<double>& times) {
  if (times.empty()) throw InvalidArgument("no time samples requested");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] < times[k - 1]) {
      throw InvalidArgument("time samples must be non-decreasing");
    }
  }
}

// Builds the path for densities given by cell-valued callbacks, prefixed
// with the linear homotopy from 1 when the first sample is not 1.
FlowPath make_path(std::function<RVector(double)> density,
                   std::function<RVector(double)> rate,
                   const std::vector<double>& times) {
  const double t0 = times.front();
  const RVector f0 = density(t0);
  FlowPath path;
  const bool anchor = max_deviation_from_one(f0) > 1e-12;
  const double offset = anchor ? 1.0 : 0.0;
  if (anchor) {
    path.density = [=](double s) -> RVector {
      if (s <= 1.0) return (1.0 + s * (f0.array() - 1.0)).matrix();
      return density(t0 + s - 1.0);
    };
    path.rate = [=](double s) -> RVector {
      if (s <= 1.0) return (f0.array() - 1.0).matrix();
      return rate(t0 + s - 1.0);
    };
  } else {
    path.density = [=](double s) { return density(t0 + s); };
    path.rate = [=](double s) { return rate(t0 + s); };
  }
  for (double t : times) path.sample_params.push_back(offset + t - t0);
  path.end = path.sample_params.back();
  return path;
}

// Fixed-point iteration; returns the staggered displacement as well.
struct FixedPointOutcome {
  StaggeredField eta;
  int iterations = 0;
  std::vector<double> increments;
};

FixedPointOutcome fixed_point_displacement(const RVector& f_cells,
                                           const GridPtr& grid,
                                           const MoserOptions& options) {
  if (!(f_cells.minCoeff() > 0.0)) {
    throw NonPositiveDensity("density is not positive");
  }
  const double deviation = max_deviation_from_one(f_cells);
  if (deviation > options.contraction_bound) {
    throw ContractionBoundExceeded(deviation, options.contraction_bound);
  }
  const auto linv = cached_right_inverse(grid);
  FixedPointOutcome out;
  out.eta = StaggeredField(grid);
  for (int it = 1; it <= options.max_iter; ++it) {
    const std::vector<Mat> jac = out.eta.cell_jacobians();
    RVector rhs(grid->cell_count());
    for (Index c = 0; c < grid->cell_count(); ++c) {
      rhs(c) = f_cells(c) - 1.0 - q_residual(jac[c]);
    }
    StaggeredField next = linv->apply(rhs);
    StaggeredField diff = next;
    diff *= -1.0;
    diff += out.eta;
    const double inc = diff.max_abs();
    out.eta = std::move(next);
    out.increments.push_back(inc);
    out.iterations = it;
    if (inc <= options.tol) return out;
  }
  throw NoConvergence("Moser fixed point", options.max_iter);
}

Vec invert_displacement(const StaggeredField& eta, const Vec& x) {
  Vec p = x;
  for (int it = 0; it < 200; ++it) {
    const Vec next = x - eta.interpolate(p);
    const double change = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (change <= 1e-14) break;
  }
  return p;
}

}  // namespace

Vec MoserMap::apply(const Vec& y) const { return q1_interpolate(*grid, forward, y); }

Vec MoserMap::apply_inverse(const Vec& x) const {
  return q1_interpolate(*grid, inverse, x);
}

std::vector<Vec> nodal_identity(const ReferenceGrid& grid) {
  std::vector<Vec> out(grid.node_count());
  for (Index i = 0; i < grid.node_count(); ++i) out[i] = grid.node(i);
  return out;
}

Vec q1_interpolate(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
                   const Vec& y) {
  const auto loc = grid.locate(y);
  const auto w = grid.interpolation_weights(loc);
  const auto nodes = grid.cell_nodes(loc.cell);
  Vec out = Vec::Zero(grid.dimension());
  for (int a = 0; a < grid.nodes_per_cell(); ++a) out += w[a] * nodal[nodes[a]];
  return out;
}

Mat q1_gradient(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
                const Vec& y) {
  const auto loc = grid.locate(y);
  const auto g = grid.interpolation_gradients(loc);
  const auto nodes = grid.cell_nodes(loc.cell);
  Mat out = Mat::Zero(grid.dimension(), grid.dimension());
  for (int a = 0; a < grid.nodes_per_cell(); ++a) {
    out += nodal[nodes[a]] * g[a].transpose();
  }
  return out;
}

Vec q1_invert(const ReferenceGrid& grid, const std::vector<Vec>& nodal,
              const Vec& x, const Vec& seed, double tol) {
  Vec y = seed;
  for (int k = 0; k < grid.dimension(); ++k) {
    y(k) = std::clamp(y(k), grid.lower(k), grid.upper(k));
  }
  for (int it = 0; it < 60; ++it) {
    const Vec r = q1_interpolate(grid, nodal, y) - x;
    if (r.cwiseAbs().maxCoeff() <= tol) return y;
    const Mat J = q1_gradient(grid, nodal, y);
    y -= J.lu().solve(r);
    for (int k = 0; k < grid.dimension(); ++k) {
      y(k) = std::clamp(y(k), grid.lower(k), grid.upper(k));
    }
  }
  const Vec r = q1_interpolate(grid, nodal, y) - x;
  if (r.cwiseAbs().maxCoeff() <= 10.0 * tol) return y;
  throw NoConvergence("multilinear map inversion", 60);
}

RVector q1_cell_determinants(const ReferenceGrid& grid,
                             const std::vector<Vec>& nodal) {
  RVector det(grid.cell_count());
  const double h0 = grid.spacing(0);
  for (Index c = 0; c < grid.cell_count(); ++c) {
    const auto n = grid.cell_nodes(c);
    if (grid.dimension() == 1) {
      det(c) = (nodal[n[1]](0) - nodal[n[0]](0)) / h0;
      continue;
    }
    const double h1 = grid.spacing(1);
    const Vec dx = ((nodal[n[1]] - nodal[n[0]]) + (nodal[n[3]] - nodal[n[2]])) / (2.0 * h0);
    const Vec dy = ((nodal[n[2]] - nodal[n[0]]) + (nodal[n[3]] - nodal[n[1]])) / (2.0 * h1);
    det(c) = dx(0) * dy(1) - dx(1) * dy(0);
  }
  return det;
}

RVector image_cell_integrals(const ReferenceGrid& grid,
                             const std::vector<Vec>& nodal,
                             const std::function<double(const Vec&)>& fn) {
  RVector out(grid.cell_count());
  const double vol = grid.cell_volume();
  for (Index c = 0; c < grid.cell_count(); ++c) {
    const auto n = grid.cell_nodes(c);
    double acc = 0.0;
    if (grid.dimension() == 1) {
      const Vec& a = nodal[n[0]];
      const Vec& b = nodal[n[1]];
      const double len = b(0) - a(0);
      for (int g = 0; g < 3; ++g) {
        acc += kGauss3Weight[g] * len * fn(Vec(a + kGauss3[g] * (b - a)));
      }
    } else {
      const Vec &p00 = nodal[n[0]], &p10 = nodal[n[1]], &p01 = nodal[n[2]],
                &p11 = nodal[n[3]];
      for (int gb = 0; gb < 3; ++gb) {
        for (int ga = 0; ga < 3; ++ga) {
          const double u = kGauss3[ga], v = kGauss3[gb];
          const Vec p = (1 - u) * (1 - v) * p00 + u * (1 - v) * p10 +
                        (1 - u) * v * p01 + u * v * p11;
          const Vec du = (1 - v) * (p10 - p00) + v * (p11 - p01);
          const Vec dv = (1 - u) * (p01 - p00) + u * (p11 - p10);
          const double jac = std::abs(du(0) * dv(1) - du(1) * dv(0));
          acc += kGauss3Weight[ga] * kGauss3Weight[gb] * jac * fn(p);
        }
      }
    }
    out(c) = acc / vol;
  }
  return out;
}

double polish_cell_measures(const ReferenceGrid& grid, std::vector<Vec>& nodal,
                            const RVector& target,
                            const std::function<double(const Vec&)>& weight,
                            int max_iter) {
  const int dim = grid.dimension();
  const Index cells = grid.cell_count();
  const std::vector<Index>& interior = grid.interior_nodes();
  std::vector<Index> slot(grid.node_count(), -1);
  for (std::size_t k = 0; k < interior.size(); ++k) slot[interior[k]] = static_cast<Index>(k);
  const Index unknowns = static_cast<Index>(interior.size()) * dim;

  auto measures = [&](const std::vector<Vec>& map) {
    return weight ? image_cell_integrals(grid, map, weight)
                  : q1_cell_determinants(grid, map);
  };
  auto residual_of = [&](const RVector& F) {
    RVector r = F - target;
    return RVector(r.array() - r.mean());
  };
  RVector F = measures(nodal);
  RVector r = residual_of(F);
  double current = r.cwiseAbs().maxCoeff();
  if (unknowns == 0) return current;

  const double h0 = grid.spacing(0);
  const double h1 = dim == 2 ? grid.spacing(1) : 1.0;
  const double sx[4] = {-1.0, 1.0, -1.0, 1.0};
  const double sy[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int it = 0; it < max_iter && current > 1e-13; ++it) {
    const RVector area = q1_cell_determinants(grid, nodal);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(cells) * 8);
    for (Index c = 0; c < cells; ++c) {
      const auto n = grid.cell_nodes(c);
      const double g = weight ? F(c) / area(c) : 1.0;
      if (dim == 1) {
        if (slot[n[0]] >= 0) trip.emplace_back(c, slot[n[0]], -g / h0);
        if (slot[n[1]] >= 0) trip.emplace_back(c, slot[n[1]], g / h0);
        continue;
      }
      const Vec dx = ((nodal[n[1]] - nodal[n[0]]) + (nodal[n[3]] - nodal[n[2]])) / (2.0 * h0);
      const Vec dy = ((nodal[n[2]] - nodal[n[0]]) + (nodal[n[3]] - nodal[n[1]])) / (2.0 * h1);
      for (int a = 0; a < 4; ++a) {
        const Index k = slot[n[a]];
        if (k < 0) continue;
        const double ax = sx[a] / (2.0 * h0), ay = sy[a] / (2.0 * h1);
        trip.emplace_back(c, 2 * k, g * (ax * dy(1) - ay * dx(1)));
        trip.emplace_back(c, 2 * k + 1, g * (-ax * dy(0) + ay * dx(0)));
      }
    }
    SparseR J(cells, unknowns);
    J.setFromTriplets(trip.begin(), trip.end());
    SparseR JJt = J * SparseR(J.transpose());
    double scale = 0.0;
    for (Index c = 0; c < cells; ++c) scale = std::max(scale, JJt.coeff(c, c));
    for (Index c = 0; c < cells; ++c) JJt.coeffRef(c, c) += 1e-12 * scale;
    Eigen::SimplicialLDLT<SparseR> solver(JJt);
    if (solver.info() != Eigen::Success) break;
    const RVector delta = -(J.transpose() * solver.solve(r));

    bool improved = false;
    for (double step = 1.0; step >= 1.0 / 16.0; step *= 0.5) {
      std::vector<Vec> trial = nodal;
      for (std::size_t k = 0; k < interior.size(); ++k) {
        for (int d = 0; d < dim; ++d) trial[interior[k]](d) += step * delta(dim * k + d);
      }
      if (!(q1_cell_determinants(grid, trial).minCoeff() > 0.0)) continue;
      const RVector Ft = measures(trial);
      const RVector rt = residual_of(Ft);
      const double m = rt.cwiseAbs().maxCoeff();
      if (m < current) {
        improved = m < 0.9 * current;
        nodal = std::move(trial);
        F = Ft;
        r = rt;
        current = m;
        break;
      }
    }
    if (!improved) break;
  }
  return current;
}

std::shared_ptr<const DivergenceRightInverse> cached_right_inverse(
    const GridPtr& grid) {
  using Key = std::tuple<int, int, int, double, double, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const DivergenceRightInverse>> cache;
  const int dim = grid->dimension();
  const Key key{dim, grid->cells(0), dim == 2 ? grid->cells(1) : 0,
                grid->lower(0), grid->upper(0), dim == 2 ? grid->lower(1) : 0.0,
                dim == 2 ? grid->upper(1) : 0.0};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto made = build_divergence_right_inverse(grid);
  cache.emplace(key, made);
  return made;
}

std::vector<MoserMap> moser_flow(const DensityFamily& f, const GridPtr& grid,
                                 const std::vector<double>& time_samples,
                                 const MoserOptions& options) {
  check_sorted(time_samples);
  f.validate(*grid, time_samples);
  const auto linv = cached_right_inverse(grid);
  const FlowPath path = make_path(
      [&f, grid](double t) { return f.cell_averages(*grid, t); },
      [&f, grid](double t) { return f.rate_cell_averages(*grid, t); },
      time_samples);
  const FlowOutput flow = integrate_flow(grid, *linv, path, options.min_steps);

  std::vector<MoserMap> maps;
  for (std::size_t j = 0; j < time_samples.size(); ++j) {
    const double t = time_samples[j];
    MoserMap m = finish_map(grid, t, flow.phi[j], flow.psi[j],
                            f.cell_averages(*grid, t), "flow");
    // det(D psi) f(psi) should be 1.
    const auto fv = f.at_time(*grid, t);
    const RVector det_psi = q1_cell_determinants(*grid, m.inverse);
    double worst = 0.0;
    for (Index c = 0; c < grid->cell_count(); ++c) {
      const Vec centre = q1_interpolate(*grid, m.inverse, grid->cell_center(c));
      worst = std::max(worst, std::abs(det_psi(c) * fv(centre) - 1.0));
    }
    m.flow_identity_residual = worst;
    maps.push_back(std::move(m));
  }
  return maps;
}

MoserMap moser_fixed_point(const RVector& f_cells, const GridPtr& grid,
                           const MoserOptions& options, double time) {
  const FixedPointOutcome fp = fixed_point_displacement(f_cells, grid, options);
  std::vector<Vec> forward = nodal_identity(*grid);
  std::vector<Vec> inverse = forward;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    const Vec y = forward[i];
    forward[i] = y + fp.eta.interpolate(y);
    inverse[i] = invert_displacement(fp.eta, y);
  }
  MoserMap m = finish_map(grid, time, std::move(forward), std::move(inverse),
                          f_cells, "fixed-point");
  m.iterations = fp.iterations;
  m.increments = fp.increments;
  return m;
}

MoserMap moser_fixed_point(const DensityFamily& f, const GridPtr& grid,
                           double time, const MoserOptions& options) {
  f.validate(*grid, {time});
  return moser_fixed_point(f.cell_averages(*grid, time), grid, options, time);
}

std::vector<MoserMap> moser_combined(const DensityFamily& f,
                                     const GridPtr& grid,
                                     const std::vector<double>& time_samples,
                                     const MoserOptions& options) {
  check_sorted(time_samples);
  f.validate(*grid, time_samples);
  const auto linv = cached_right_inverse(grid);
  double width = options.smoothing > 0.0 ? options.smoothing
                                         : 2.0 * grid->max_spacing();
  std::string last_failure;
  for (int attempt = 0; attempt <= options.retries; ++attempt, width *= 0.5) {
    try {
      // Regularized density f1 = S f / mean(S f) and its time derivative.
      auto smoothed = [&f, grid, width](double t) {
        const RVector g = smooth_cells(*grid, f.cell_averages(*grid, t), width);
        return RVector(g / g.mean());
      };
      auto smoothed_rate = [&f, grid, width](double t) {
        const RVector g = smooth_cells(*grid, f.cell_averages(*grid, t), width);
        const RVector dg = smooth_cells(*grid, f.rate_cell_averages(*grid, t), width);
        const double m = g.mean();
        return RVector(dg / m - g * (dg.mean() / (m * m)));
      };
      const FlowPath path = make_path(smoothed, smoothed_rate, time_samples);
      const FlowOutput flow = integrate_flow(grid, *linv, path, options.min_steps);

      std::vector<MoserMap> maps;
      for (std::size_t j = 0; j < time_samples.size(); ++j) {
        const double t = time_samples[j];
        const std::vector<Vec>& phi1 = flow.phi[j];
        // Exact inverse of the multilinear phi1, seeded by the forward flow.
        std::vector<Vec> phi1_inv(phi1.size());
        for (std::size_t i = 0; i < phi1.size(); ++i) {
          const Vec x = grid->node(static_cast<Index>(i));
          phi1_inv[i] = grid->on_boundary(static_cast<Index>(i))
                            ? x
                            : q1_invert(*grid, phi1, x, flow.psi[j][i]);
        }
        // f2 = (f / det D phi1) o phi1^{-1}, measured cell by cell.
        const auto fv = f.at_time(*grid, t);
        RVector f2 = image_cell_integrals(*grid, phi1_inv, fv);
        f2 /= f2.mean();
        const FixedPointOutcome fp = fixed_point_displacement(f2, grid, options);

        std::vector<Vec> forward(phi1.size()), inverse(phi1.size());
        for (std::size_t i = 0; i < phi1.size(); ++i) {
          const Vec x = grid->node(static_cast<Index>(i));
          forward[i] = phi1[i] + fp.eta.interpolate(phi1[i]);
          const Vec p = invert_displacement(fp.eta, x);
          inverse[i] = q1_invert(*grid, phi1, p, q1_interpolate(*grid, phi1_inv, p));
        }
        MoserMap m = finish_map(grid, t, std::move(forward), std::move(inverse),
                                f.cell_averages(*grid, t), "combined");
        m.iterations = fp.iterations;
        m.increments = fp.increments;
        maps.push_back(std::move(m));
      }
      return maps;
    } catch (const ContractionBoundExceeded& e) {
      last_failure = e.what();
    } catch (const NoConvergence& e) {
      last_failure = e.what();
    } catch (const FlowLeftDomain& e) {
      last_failure = e.what();
    }
  }
  throw PipelineFailed("combined Moser construction failed after retries: " +
                       last_failure);
}

NormalizedDiffeo normalize_diffeo(const DiffeoFamily& h, const GridPtr& grid,
                                  const std::vector<double>& time_samples,
                                  const MoserOptions& options) {
  check_sorted(time_samples);
  const DiffeoFamily hf = h;
  DensityFamily f(
      [hf](double t, const Vec& y) { return jacobian_at(hf, t, y).det; },
      [hf](double t, const Vec& y) {
        return jacobian_at(hf, t, y).det * jacobian_log_derivative(hf, t, y);
      },
      true, h.t_min(), h.t_max());

  NormalizedDiffeo out;
  out.times = time_samples;
  out.maps = moser_combined(f, grid, time_samples, options);
  const auto det_h = [&hf](double t) {
    return [hf, t](const Vec& y) { return jacobian_at(hf, t, y).det; };
  };
  for (std::size_t j = 0; j < time_samples.size(); ++j) {
    const double t = time_samples[j];
    const double ratio = grid->cell_averages(det_h(t)).mean();
    MoserMap& m = out.maps[j];
    // Correct phi^{-1} so that h o phi^{-1} has the exact cell volumes,
    // then take phi as its multilinear inverse.
    polish_cell_measures(*grid, m.inverse, RVector::Constant(grid->cell_count(), ratio),
                         det_h(t));
    for (Index i : grid->interior_nodes()) {
      m.forward[i] = q1_invert(*grid, m.inverse, grid->node(i), m.forward[i]);
    }
    m.det = q1_cell_determinants(*grid, m.forward);
    m.residual = (m.det - m.target).cwiseAbs().maxCoeff();
    std::vector<Vec> nodes(m.inverse.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = h.map(t, m.inverse[i]);
    const RVector det = image_cell_integrals(*grid, m.inverse, det_h(t));
    out.volume_ratio.push_back(ratio);
    out.nodes.push_back(std::move(nodes));
    out.det.push_back(det);
    out.relative_residual.push_back((det.array() - ratio).abs().maxCoeff() / ratio);
  }

  DiffeoFamily::Parts parts;
  parts.dimension = h.dimension();
  parts.name = h.name() + "@normalized";
  const std::vector<double> times = out.times;
  const std::vector<MoserMap> maps = out.maps;
  auto find = [times](double t) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (std::abs(times[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return j;
    }
    throw InvalidArgument("normalized family is only available at its samples");
  };
  parts.map = [hf, maps, find](double t, const Vec& y) {
    return hf.map(t, maps[find(t)].apply_inverse(y));
  };
  parts.velocity = [](double, const Vec&) -> Vec {
    throw InvalidArgument("normalized family has no time derivative");
  };
  if (h.has_inverse()) {
    parts.inverse = [hf, maps, find](double t, const Vec& x) {
      return maps[find(t)].apply(hf.inverse(t, x));
    };
  }
  parts.fd_step = grid->min_spacing() / 8.0;
  out.family = DiffeoFamily(std::move(parts));
  return out;
}

}  // namespace movdom
