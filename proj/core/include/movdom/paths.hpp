#pragma once

#include <functional>

namespace movdom {

/// A scalar function of time with its first two derivatives.
struct ScalarPath {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  double operator()(double t) const { return value(t); }

  static ScalarPath constant(double c);
  /// a + b t
  static ScalarPath linear(double a, double b);
  /// v0 + (v1 - v0) s((t - t0)/(t1 - t0)) with the quintic smoothstep s,
  /// held constant outside [t0, t1]. C2 in t.
  static ScalarPath smooth_ramp(double v0, double v1, double t0 = 0.0,
                                double t1 = 1.0);
  /// offset + amplitude sin(frequency t + phase)
  static ScalarPath sine(double offset, double amplitude, double frequency,
                         double phase = 0.0);
  /// c0 + c1 t + c2 t^2 + c3 t^3
  static ScalarPath cubic(double c0, double c1, double c2, double c3);

  /// t -> value(eps t) with chain-rule derivatives.
  ScalarPath time_rescaled(double eps) const;
};

/// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 on [0, 1], clamped outside.
double smoothstep5(double s);
double smoothstep5_d1(double s);
double smoothstep5_d2(double s);

}  // namespace movdom
