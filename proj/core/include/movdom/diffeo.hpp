#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "movdom/paths.hpp"
#include "movdom/types.hpp"

namespace movdom {

struct JacobianData {
  Mat matrix;
  double det = 0.0;
  Mat inverse;
  Mat inverse_transpose;
};

/// Fills det, inverse and inverse transpose from J. No sign check.
JacobianData make_jacobian_data(const Mat& J);

/// Time-indexed family y -> h(t, y) mapping the reference domain onto the
/// moving domain.
class DiffeoFamily {
 public:
  using PointMap = std::function<Vec(double, const Vec&)>;
  using MatrixMap = std::function<Mat(double, const Vec&)>;

  struct Parts {
    int dimension = 1;
    std::string name = "custom";
    PointMap map;
    PointMap velocity;       // d/dt h; central differences in t if empty
    MatrixMap jacobian;      // D_y h; central differences in y if empty
    MatrixMap jacobian_rate; // d/dt D_y h; differences of velocity if empty
    PointMap inverse;        // optional
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    double fd_step = 1e-5;   // spatial step for difference fallbacks
    bool motionless = false;
  };

  DiffeoFamily() = default;
  explicit DiffeoFamily(Parts parts);

  int dimension() const { return parts_.dimension; }
  const std::string& name() const { return parts_.name; }
  double t_min() const { return parts_.t_min; }
  double t_max() const { return parts_.t_max; }
  double fd_step() const { return parts_.fd_step; }
  bool has_inverse() const { return static_cast<bool>(parts_.inverse); }
  bool analytic_jacobian() const { return static_cast<bool>(parts_.jacobian); }
  bool motionless() const { return parts_.motionless; }

  Vec map(double t, const Vec& y) const;
  Vec velocity(double t, const Vec& y) const;
  Mat jacobian(double t, const Vec& y) const;
  Mat jacobian_rate(double t, const Vec& y) const;
  /// Throws InverseUnavailable when no inverse evaluator was supplied.
  Vec inverse(double t, const Vec& x) const;

  /// Throws InvalidArgument if t is outside the validity window.
  void check_time(double t) const;

  DiffeoFamily with_fd_step(double step) const;
  /// Drops the analytic Jacobian so the difference fallback is used.
  DiffeoFamily without_analytic_jacobian() const;
  /// t -> h(eps t, y).
  DiffeoFamily time_rescaled(double eps) const;
  /// The map h(t0, .) held fixed for all times (zero velocity).
  DiffeoFamily frozen(double t0) const;

  static DiffeoFamily identity(int dimension);
  /// h = y + D(t)
  static DiffeoFamily translation(std::vector<ScalarPath> D);
  /// Rotation by angle omega t about the origin.
  static DiffeoFamily rotation(double omega);
  /// h_i = f_i(t) y_i
  static DiffeoFamily diagonal(std::vector<ScalarPath> f);
  /// h = f(t) y in the given dimension.
  static DiffeoFamily homothety(const ScalarPath& f, int dimension);

 private:
  Parts parts_;
};

}  // namespace movdom
