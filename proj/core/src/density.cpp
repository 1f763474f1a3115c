#include "movdom/density.hpp"

#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

DensityFamily::DensityFamily(Fn value, Fn rate, bool normalize, double t_min,
                             double t_max)
    : value_(std::move(value)),
      rate_(std::move(rate)),
      normalize_(normalize),
      t_min_(t_min),
      t_max_(t_max) {
  if (!value_) throw InvalidArgument("density needs a value evaluator");
}

DensityFamily DensityFamily::stationary(std::function<double(const Vec&)> f,
                                        bool normalize) {
  return DensityFamily([f](double, const Vec& y) { return f(y); },
                       [](double, const Vec&) { return 0.0; }, normalize);
}

DensityFamily DensityFamily::unit() {
  return stationary([](const Vec&) { return 1.0; });
}

double DensityFamily::raw_rate(double t, const Vec& y) const {
  if (rate_) return rate_(t, y);
  const double dt = 1e-6 * std::max(1.0, std::abs(t));
  return (value_(t + dt, y) - value_(t - dt, y)) / (2.0 * dt);
}

RVector DensityFamily::cell_averages(const ReferenceGrid& grid, double t) const {
  RVector f = grid.cell_averages([&](const Vec& y) { return value_(t, y); });
  if (normalize_) f /= f.mean();
  return f;
}

RVector DensityFamily::rate_cell_averages(const ReferenceGrid& grid,
                                          double t) const {
  RVector r = grid.cell_averages([&](const Vec& y) { return raw_rate(t, y); });
  if (!normalize_) return r;
  const RVector f = grid.cell_averages([&](const Vec& y) { return value_(t, y); });
  const double m = f.mean();
  const double dm = r.mean();
  return r / m - f * (dm / (m * m));
}

std::function<double(const Vec&)> DensityFamily::at_time(
    const ReferenceGrid& grid, double t) const {
  double scale = 1.0;
  if (normalize_) {
    scale = 1.0 / grid.cell_averages([&](const Vec& y) { return value_(t, y); })
                      .mean();
  }
  return [value = value_, t, scale](const Vec& y) { return scale * value(t, y); };
}

void DensityFamily::validate(const ReferenceGrid& grid,
                             const std::vector<double>& times) const {
  for (double t : times) {
    if (t < t_min_ - 1e-12 || t > t_max_ + 1e-12) {
      throw InvalidArgument("density sampled outside its validity window");
    }
    const auto f = at_time(grid, t);
    for (Index i = 0; i < grid.node_count(); ++i) {
      const double v = f(grid.node(i));
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw NonPositiveDensity("density is not positive at a grid node");
      }
    }
    for (Index q = 0; q < grid.quadrature_count(); ++q) {
      if (!(f(grid.quadrature_point(q)) > 0.0)) {
        throw NonPositiveDensity("density is not positive at a Gauss point");
      }
    }
    const double mean = cell_averages(grid, t).mean();
    if (std::abs(mean - 1.0) > 1e-8) {
      throw InvalidArgument("density integral differs from the domain measure");
    }
  }
}

}  // namespace movdom
