#include "movdom/paths.hpp"

#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

double smoothstep5(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double smoothstep5_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

ScalarPath ScalarPath::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

ScalarPath ScalarPath::linear(double a, double b) {
  return {[a, b](double t) { return a + b * t; }, [b](double) { return b; },
          [](double) { return 0.0; }};
}

ScalarPath ScalarPath::smooth_ramp(double v0, double v1, double t0, double t1) {
  if (!(t1 > t0)) throw InvalidArgument("smooth_ramp needs t1 > t0");
  const double span = t1 - t0;
  const double jump = v1 - v0;
  return {[=](double t) { return v0 + jump * smoothstep5((t - t0) / span); },
          [=](double t) { return jump * smoothstep5_d1((t - t0) / span) / span; },
          [=](double t) {
            return jump * smoothstep5_d2((t - t0) / span) / (span * span);
          }};
}

ScalarPath ScalarPath::sine(double offset, double amplitude, double frequency,
                            double phase) {
  return {[=](double t) {
            return offset + amplitude * std::sin(frequency * t + phase);
          },
          [=](double t) {
            return amplitude * frequency * std::cos(frequency * t + phase);
          },
          [=](double t) {
            return -amplitude * frequency * frequency *
                   std::sin(frequency * t + phase);
          }};
}

ScalarPath ScalarPath::cubic(double c0, double c1, double c2, double c3) {
  return {[=](double t) { return c0 + t * (c1 + t * (c2 + t * c3)); },
          [=](double t) { return c1 + t * (2.0 * c2 + 3.0 * c3 * t); },
          [=](double t) { return 2.0 * c2 + 6.0 * c3 * t; }};
}

ScalarPath ScalarPath::time_rescaled(double eps) const {
  auto v = value;
  auto a = d1;
  auto b = d2;
  return {[v, eps](double t) { return v(eps * t); },
          [a, eps](double t) { return eps * a(eps * t); },
          [b, eps](double t) { return eps * eps * b(eps * t); }};
}

}  // namespace movdom
