#pragma once

#include <stdexcept>
#include <string>

namespace movdom {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateJacobian : public Error {
 public:
  DegenerateJacobian(double t, double det, const std::string& where);
  double time;
  double determinant;
};

class EvaluationOutsideDomain : public Error {
 public:
  using Error::Error;
};

class InverseUnavailable : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class FlowLeftDomain : public Error {
 public:
  using Error::Error;
};

class NonPositiveDensity : public Error {
 public:
  using Error::Error;
};

class ContractionBoundExceeded : public Error {
 public:
  ContractionBoundExceeded(double deviation, double bound);
  double deviation;
  double bound;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations);
  int iterations;
};

class PipelineFailed : public Error {
 public:
  using Error::Error;
};

class EllipticityViolated : public Error {
 public:
  using Error::Error;
};

class NonRealEnergy : public Error {
 public:
  using Error::Error;
};

class SolverDivergence : public Error {
 public:
  using Error::Error;
};

class SnapshotMissing : public Error {
 public:
  using Error::Error;
};

class DegenerateBranch : public Error {
 public:
  DegenerateBranch(double tau, double gap);
  double tau;
  double gap;
};

class GaugeIncompatible : public Error {
 public:
  GaugeIncompatible(double t, double residual);
  double time;
  double residual;
};

class NonMonotoneReparametrization : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

}  // namespace movdom
