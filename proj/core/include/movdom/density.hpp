#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "movdom/grid.hpp"

namespace movdom {

/// Positive density f(t, y) on the reference domain whose integral equals
/// the measure of the domain. With normalize = true the raw evaluator is
/// divided by its grid mean at each time.
class DensityFamily {
 public:
  using Fn = std::function<double(double, const Vec&)>;

  DensityFamily() = default;
  DensityFamily(Fn value, Fn rate = {}, bool normalize = false,
                double t_min = -std::numeric_limits<double>::infinity(),
                double t_max = std::numeric_limits<double>::infinity());

  /// f(y) for all t.
  static DensityFamily stationary(std::function<double(const Vec&)> f,
                                  bool normalize = false);
  static DensityFamily unit();

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

  RVector cell_averages(const ReferenceGrid& grid, double t) const;
  RVector rate_cell_averages(const ReferenceGrid& grid, double t) const;
  /// Pointwise evaluator of f(t, .) consistent with cell_averages.
  std::function<double(const Vec&)> at_time(const ReferenceGrid& grid,
                                            double t) const;

  /// Throws NonPositiveDensity or InvalidArgument when the hypotheses fail
  /// at one of the given times.
  void validate(const ReferenceGrid& grid, const std::vector<double>& times) const;

 private:
  double raw_rate(double t, const Vec& y) const;

  Fn value_;
  Fn rate_;
  bool normalize_ = false;
  double t_min_ = -std::numeric_limits<double>::infinity();
  double t_max_ = std::numeric_limits<double>::infinity();
};

}  // namespace movdom
