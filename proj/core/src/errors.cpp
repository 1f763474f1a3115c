#include "movdom/errors.hpp"

#include <sstream>

namespace movdom {

namespace {

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream out;
  out.precision(17);
  (out << ... << args);
  return out.str();
}

}  // namespace

DegenerateJacobian::DegenerateJacobian(double t, double det,
                                       const std::string& where)
    : Error(concat("degenerate Jacobian at t=", t, " (det=", det, ") ", where)),
      time(t),
      determinant(det) {}

ContractionBoundExceeded::ContractionBoundExceeded(double deviation,
                                                   double bound)
    : Error(concat("density deviation ", deviation,
                   " exceeds contraction bound ", bound)),
      deviation(deviation),
      bound(bound) {}

NoConvergence::NoConvergence(const std::string& what, int iterations)
    : Error(concat(what, " did not converge after ", iterations,
                   " iterations")),
      iterations(iterations) {}

DegenerateBranch::DegenerateBranch(double tau, double gap)
    : Error(concat("spectral gap ", gap, " below floor at tau=", tau)),
      tau(tau),
      gap(gap) {}

GaugeIncompatible::GaugeIncompatible(double t, double residual)
    : Error(concat("gauge incompatible with motion at t=", t,
                   " (residual ", residual, ")")),
      time(t),
      residual(residual) {}

}  // namespace movdom
