#include "movdom/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "movdom/errors.hpp"
#include "movdom/spectrum.hpp"

namespace movdom {

GaugeSpec GaugeSpec::zero(int dimension) {
  GaugeSpec g;
  g.phase = [](double, const Vec&) { return 0.0; };
  g.gradient = [dimension](double, const Vec&) { return Vec(Vec::Zero(dimension)); };
  g.rate = [](double, const Vec&) { return 0.0; };
  return g;
}

namespace {

double compatibility_at(const GaugeSpec& gauge, const DiffeoFamily& family,
                        double t, const Vec& y, double* scale) {
  const Vec v = family.velocity(t, y);
  const Vec x = family.map(t, y);
  if (scale) *scale = std::max(*scale, v.cwiseAbs().maxCoeff());
  return (v - 2.0 * gauge.gradient(t, x)).cwiseAbs().maxCoeff();
}

GridPtr unit_grid(int dimension, int cells) {
  if (cells < 2) throw InvalidArgument("scenario grids need at least 2 cells");
  return ReferenceGrid::unit(dimension, cells);
}

}  // namespace

double gauge_compatibility_residual(const GaugeSpec& gauge,
                                    const DiffeoFamily& family, double t,
                                    const GridPtr& grid) {
  double worst = 0.0;
  for (Index i = 0; i < grid->node_count(); ++i) {
    worst = std::max(worst, compatibility_at(gauge, family, t, grid->node(i), nullptr));
  }
  return worst;
}

double gauge_compatibility_residual_random(const GaugeSpec& gauge,
                                           const DiffeoFamily& family,
                                           const GridPtr& grid, double t0,
                                           double t1, int samples,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = t0 + (t1 - t0) * unit(rng);
    Vec y(grid->dimension());
    for (int k = 0; k < grid->dimension(); ++k) {
      y(k) = grid->lower(k) + (grid->upper(k) - grid->lower(k)) * unit(rng);
    }
    worst = std::max(worst, compatibility_at(gauge, family, t, y, nullptr));
  }
  return worst;
}

GridFunction apply_gauge(const GridFunction& v, const GaugeSpec& gauge,
                         const DiffeoFamily& family, double t) {
  const GridPtr& grid = v.grid();
  double scale = 1.0, residual = 0.0;
  for (Index i = 0; i < grid->node_count(); ++i) {
    residual = std::max(residual,
                        compatibility_at(gauge, family, t, grid->node(i), &scale));
  }
  if (residual > 1e-10 * scale) throw GaugeIncompatible(t, residual);
  GridFunction w = v;
  for (Index i = 0; i < grid->node_count(); ++i) {
    const double phi = gauge.phase(t, family.map(t, grid->node(i)));
    w(i) *= std::polar(1.0, -phi);
  }
  return w;
}

Assembler ScenarioDef::assembler() const {
  return [family = family, coeffs = coeffs, grid = grid, bc = bc](double t) {
    return assemble_hamiltonian(family, grid, coeffs, t, bc);
  };
}

DiscreteHamiltonian ScenarioDef::hamiltonian(double t) const {
  return assemble_hamiltonian(family, grid, coeffs, t, bc);
}

GridFunction ScenarioDef::initial_state() const {
  if (samples) return *samples;
  const DiscreteHamiltonian H =
      assemble_hamiltonian(family.frozen(t_start), grid, coeffs, t_start, bc);
  const Eigenpairs pairs = lowest_eigenpairs(H.matrix, eigen_index + 1);
  return H.from_dofs(pairs.vectors.col(eigen_index));
}

ScenarioDef static_scenario(const ScenarioOptions& o) {
  ScenarioDef s;
  s.name = "static";
  s.family = DiffeoFamily::identity(1);
  s.coeffs = CoefficientSet::free(1);
  s.bc = o.bc;
  s.grid = unit_grid(1, o.cells);
  s.t_start = o.t_start;
  s.t_end = o.t_end;
  s.eigen_index = o.eigen_index;
  s.observables = {"norm", "energy"};
  s.gauge = GaugeSpec::zero(1);
  ReducedModel r;
  r.description = "identical operator";
  r.assemble = s.assembler();
  r.model_time = [](double t) { return t; };
  r.global_phase = [](double) { return 0.0; };
  s.reduced = r;
  return s;
}

ScenarioDef translation_scenario(std::vector<ScalarPath> D, const ScenarioOptions& o) {
  const int dim = static_cast<int>(D.size());
  if (dim < 1 || dim > 2) throw InvalidArgument("translation needs 1 or 2 components");
  ScenarioDef s;
  s.name = "translation";
  s.family = DiffeoFamily::translation(D);
  s.coeffs = CoefficientSet::free(dim);
  s.bc = o.bc;
  s.grid = unit_grid(dim, o.cells);
  s.t_start = o.t_start;
  s.t_end = o.t_end;
  s.eigen_index = o.eigen_index;
  s.observables = {"norm", "energy"};

  GaugeSpec g;
  g.phase = [D](double t, const Vec& x) {
    double p = 0.0;
    for (std::size_t k = 0; k < D.size(); ++k) p += 0.5 * D[k].d1(t) * x(k);
    return p;
  };
  g.gradient = [D](double t, const Vec&) {
    Vec v(static_cast<Index>(D.size()));
    for (std::size_t k = 0; k < D.size(); ++k) v(k) = 0.5 * D[k].d1(t);
    return v;
  };
  g.rate = [D](double t, const Vec& x) {
    double p = 0.0;
    for (std::size_t k = 0; k < D.size(); ++k) p += 0.5 * D[k].d2(t) * x(k);
    return p;
  };
  s.gauge = g;

  CoefficientSet reduced = CoefficientSet::free(dim);
  reduced.electric = [D](double t, const Vec& y) {
    double v = 0.0;
    for (std::size_t k = 0; k < D.size(); ++k) v += 0.5 * D[k].d2(t) * y(k);
    return v;
  };
  ReducedModel r;
  r.description = "-Delta + 1/2 <D'', y>";
  r.assemble = [reduced, grid = s.grid, bc = s.bc, dim](double t) {
    return assemble_hamiltonian(DiffeoFamily::identity(dim), grid, reduced, t, bc);
  };
  r.model_time = [](double t) { return t; };
  const double t0 = o.t_start;
  r.global_phase = [D, t0](double t) {
    double dd = 0.0;
    for (const ScalarPath& p : D) dd += p.d1(t) * p(t);
    auto speed2 = [&D](double s) {
      double v = 0.0;
      for (const ScalarPath& p : D) v += p.d1(s) * p.d1(s);
      return v;
    };
    const double integral =
        t > t0 ? boost::math::quadrature::gauss_kronrod<double, 31>::integrate(speed2, t0, t)
               : 0.0;
    return 0.5 * dd - 0.25 * integral;
  };
  s.reduced = r;
  return s;
}

namespace {

using Integrand = std::function<Complex(int a, int b, int lq, const Vec& y)>;

// Dirichlet assembly on a motionless grid in the coordinates z = sqrt(w) v.
SparseC assemble_dirichlet_form(const GridPtr& grid, const Integrand& integrand) {
  const DiscreteHamiltonian layout = empty_hamiltonian(grid, BoundaryCondition::Dirichlet);
  const int nc = grid->nodes_per_cell();
  const double wq = grid->quadrature_weight();
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(grid->cell_count()) * nc * nc);
  for (Index c = 0; c < grid->cell_count(); ++c) {
    const auto nodes = grid->cell_nodes(c);
    for (int a = 0; a < nc; ++a) {
      const Index ra = layout.node_to_dof[nodes[a]];
      if (ra < 0) continue;
      for (int b = 0; b < nc; ++b) {
        const Index cb = layout.node_to_dof[nodes[b]];
        if (cb < 0) continue;
        Complex v = 0.0;
        for (int lq = 0; lq < nc; ++lq) {
          v += wq * integrand(a, b, lq, grid->quadrature_point(c * nc + lq));
        }
        trip.emplace_back(ra, cb, v);
      }
    }
  }
  SparseC K(layout.size(), layout.size());
  K.setFromTriplets(trip.begin(), trip.end());
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseC::InnerIterator it(K, col); it; ++it) {
      it.valueRef() /= layout.sqrt_weights(it.row()) * layout.sqrt_weights(it.col());
    }
  }
  return K;
}

double relative_difference(const SparseC& A, const SparseC& B) {
  const SparseC d = A - B;
  double worst = 0.0, scale = 0.0;
  for (int c = 0; c < d.outerSize(); ++c) {
    for (SparseC::InnerIterator it(d, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  for (int c = 0; c < B.outerSize(); ++c) {
    for (SparseC::InnerIterator it(B, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  return scale > 0.0 ? worst / scale : worst;
}

GridPtr rotation_grid(int cells) {
  if (cells < 2) throw InvalidArgument("scenario grids need at least 2 cells");
  return ReferenceGrid::rectangle(-0.5, 0.5, -0.5, 0.5, cells, cells);
}

}  // namespace

RotationAssemblies rotation_assemblies(double omega, int cells, double t) {
  const GridPtr grid = rotation_grid(cells);
  RotationAssemblies out;
  out.transport = assemble_dirichlet_form(grid, [&](int a, int b, int lq, const Vec& y) {
    const Vec& ga = grid->shape_gradient(a, lq);
    const Vec& gb = grid->shape_gradient(b, lq);
    const double perp_grad = -y(1) * gb(0) + y(0) * gb(1);
    return Complex(ga.dot(gb), omega * grid->shape(a, lq) * perp_grad);
  });
  out.magnetic = assemble_dirichlet_form(grid, [&](int a, int b, int lq, const Vec& y) {
    const double na = grid->shape(a, lq), nb = grid->shape(b, lq);
    Vec perp(2);
    perp << -y(1), y(0);
    CVec Ta(2), Tb(2);
    for (int k = 0; k < 2; ++k) {
      Ta(k) = Complex(grid->shape_gradient(a, lq)(k), -0.5 * omega * perp(k) * na);
      Tb(k) = Complex(grid->shape_gradient(b, lq)(k), -0.5 * omega * perp(k) * nb);
    }
    return Ta.dot(Tb) - 0.25 * omega * omega * y.squaredNorm() * na * nb;
  });
  out.general = assemble_hamiltonian(DiffeoFamily::rotation(omega), grid,
                                     CoefficientSet::free(2), t,
                                     BoundaryCondition::Dirichlet)
                    .matrix;
  out.transport_vs_magnetic = relative_difference(out.transport, out.magnetic);
  out.general_vs_magnetic = relative_difference(out.general, out.magnetic);
  return out;
}

ScenarioDef rotation_scenario(double omega, const ScenarioOptions& o) {
  ScenarioDef s;
  s.name = "rotation";
  s.family = DiffeoFamily::rotation(omega);
  s.coeffs = CoefficientSet::free(2);
  s.bc = o.bc;
  s.grid = rotation_grid(o.cells);
  s.t_start = o.t_start;
  s.t_end = o.t_end;
  s.eigen_index = o.eigen_index;
  s.observables = {"norm", "energy"};
  if (s.bc == BoundaryCondition::Dirichlet) {
    ReducedModel r;
    r.description = "-Delta + i omega <y_perp, grad>";
    const GridPtr grid = s.grid;
    auto K = std::make_shared<SparseC>(rotation_assemblies(omega, o.cells).transport);
    r.assemble = [grid, K](double t) {
      DiscreteHamiltonian H = empty_hamiltonian(grid, BoundaryCondition::Dirichlet);
      H.time = t;
      H.matrix = *K;
      return H;
    };
    r.model_time = [](double t) { return t; };
    r.global_phase = [](double) { return 0.0; };
    s.reduced = r;
    s.gauge = GaugeSpec::zero(2);
  }
  return s;
}

Reparametrization homothety_reparametrization(const ScalarPath& f, double t0) {
  auto density = [f](double t) {
    const double v = f(t);
    if (!(v > 0.0)) {
      throw NonMonotoneReparametrization("scale factor must stay positive");
    }
    return 1.0 / (v * v);
  };
  Reparametrization r;
  r.tau = [density, t0](double t) {
    if (t == t0) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, t0, t, 15, 1e-14);
  };
  r.time = [density, tau = r.tau, t0](double s) {
    if (s == 0.0) return t0;
    // dtau/dt = f^-2 > 0, so Newton from the tau-space guess converges.
    auto fn = [&](double t) { return std::make_pair(tau(t) - s, density(t)); };
    const double lo = t0 - 1e6, hi = t0 + 1e6;
    return boost::math::tools::newton_raphson_iterate(fn, t0 + s, lo, hi, 50);
  };
  return r;
}

ScenarioDef homothety_scenario(const ScalarPath& f, const ScenarioOptions& o,
                               int dimension) {
  ScenarioDef s;
  s.name = "homothety";
  s.family = DiffeoFamily::homothety(f, dimension);
  s.coeffs = CoefficientSet::free(dimension);
  s.bc = o.bc;
  s.grid = unit_grid(dimension, o.cells);
  s.t_start = o.t_start;
  s.t_end = o.t_end;
  s.eigen_index = o.eigen_index;
  s.observables = {"norm", "energy"};

  GaugeSpec g;
  g.phase = [f](double t, const Vec& x) { return 0.25 * f.d1(t) / f(t) * x.squaredNorm(); };
  g.gradient = [f](double t, const Vec& x) { return Vec(0.5 * f.d1(t) / f(t) * x); };
  g.rate = [f](double t, const Vec& x) {
    const double r = f.d1(t) / f(t);
    return 0.25 * (f.d2(t) / f(t) - r * r) * x.squaredNorm();
  };
  s.gauge = g;

  const Reparametrization rep = homothety_reparametrization(f, o.t_start);
  // U = f' f / 4 and U'(tau) = f^2 (f'' f + f'^2) / 4, so that
  // U' - 4 U^2 = f'' f^3 / 4.
  ReducedModel r;
  r.description = "-Delta + (U'(tau) - 4 U^2) |y|^2 in tau";
  r.assemble = [f, time = rep.time, grid = s.grid, bc = s.bc, dimension](double tau) {
    const double t = time(tau);
    const double F = f(t), F1 = f.d1(t), F2 = f.d2(t);
    const double U = 0.25 * F1 * F;
    const double dU = 0.25 * F * F * (F2 * F + F1 * F1);
    const double c = dU - 4.0 * U * U;
    CoefficientSet reduced = CoefficientSet::free(dimension);
    reduced.electric = [c](double, const Vec& y) { return c * y.squaredNorm(); };
    return assemble_hamiltonian(DiffeoFamily::identity(dimension), grid, reduced,
                                tau, bc);
  };
  r.model_time = rep.tau;
  r.global_phase = [](double) { return 0.0; };
  s.reduced = r;
  return s;
}

ScenarioDef moving_interval_scenario(const ScalarPath& ell, const ScenarioOptions& o) {
  ScenarioDef s;
  s.name = "moving_interval";
  s.family = DiffeoFamily::homothety(ell, 1);
  s.coeffs = CoefficientSet::free(1);
  s.bc = o.bc;
  s.grid = unit_grid(1, o.cells);
  s.t_start = o.t_start;
  s.t_end = o.t_end;
  s.eigen_index = o.eigen_index;
  s.observables = {"norm", "energy", "overlap_0"};
  return s;
}

ScenarioDef cylinder_scenario(const ScalarPath& ell, const ScenarioOptions& o) {
  ScenarioOptions opts = o;
  opts.bc = BoundaryCondition::MagneticNeumann;
  ScenarioDef s = moving_interval_scenario(ell, opts);
  s.name = "cylinder";
  return s;
}

std::pair<Complex, Complex> cylinder_flux_coefficients(const ScenarioDef& cylinder,
                                                       double t) {
  Complex fixed = 0.0, moving = 0.0;
  for (const BoundaryEntry& e : cylinder.grid->boundary()) {
    const Complex c = neumann_flux_coefficient(cylinder.family, t, *cylinder.grid, e);
    if (e.normal(0) < 0.0) {
      fixed = c;
    } else {
      moving = c;
    }
  }
  return {fixed, moving};
}

GaugeReport gauge_equivalence_check(const ScenarioDef& scenario,
                                    const PropagatorConfig& config) {
  if (!scenario.gauge || !scenario.reduced) {
    throw InvalidArgument("scenario '" + scenario.name + "' has no reduced model");
  }
  config.validate();
  const GaugeSpec& gauge = *scenario.gauge;
  const ReducedModel& reduced = *scenario.reduced;
  const GridFunction v0 = scenario.initial_state();

  GaugeReport report;
  report.full = evolve(scenario.assembler(), v0, config);

  std::vector<double> model_times;
  for (double t : report.full.times) model_times.push_back(reduced.model_time(t));
  PropagatorConfig rc = config;
  rc.references.clear();
  const GridFunction w0 = apply_gauge(v0, gauge, scenario.family, config.t_start);
  report.reduced = evolve_on_grid(reduced.assemble, w0, model_times, rc);
  report.global_phase = reduced.global_phase(config.t_end);
  report.reduced.global_phase = report.global_phase;

  const GridFunction w_full =
      apply_gauge(report.full.final_state, gauge, scenario.family, config.t_end);
  const GridFunction& w_red = report.reduced.final_state;
  report.fidelity = std::abs(inner(w_full, w_red)) / (norm(w_full) * norm(w_red));
  return report;
}

std::vector<std::string> scenario_names() {
  return {"static", "moving_interval", "cylinder", "translation", "rotation", "homothety"};
}

ScenarioDef build_scenario(const std::string& name, const ScenarioParameters& p) {
  ScenarioOptions o;
  o.cells = p.cells;
  o.bc = p.bc;
  o.t_end = p.t_end;
  auto growth = [&p]() {
    if (p.smooth) return ScalarPath::smooth_ramp(p.l0, p.l1, 0.0, p.t_end);
    return ScalarPath::linear(p.l0, (p.l1 - p.l0) / p.t_end);
  };
  if (name == "static") return static_scenario(o);
  if (name == "moving_interval") return moving_interval_scenario(growth(), o);
  if (name == "cylinder") return cylinder_scenario(growth(), o);
  if (name == "translation") {
    return translation_scenario({ScalarPath::cubic(0.0, 0.0, 0.5 * p.accel, 0.0)}, o);
  }
  if (name == "rotation") return rotation_scenario(p.omega, o);
  if (name == "homothety") {
    return homothety_scenario(ScalarPath::cubic(1.0, p.f_rate, p.f_curv, 0.0), o);
  }
  std::string list;
  for (const std::string& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
  throw ConfigInvalid("unknown scenario '" + name + "' (available: " + list + ")");
}

}  // namespace movdom
