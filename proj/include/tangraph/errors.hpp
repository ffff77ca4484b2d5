#pragma once

#include <stdexcept>
#include <string>

namespace tangraph {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold. `index` names the
// offending probe or item when there is one, otherwise -1.
class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(const std::string& what, int index = -1)
      : Error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

// The Jacobian of an immersion lost rank at a parameter point.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class UnknownEntry : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

// The component U_{r,q} reached the edge of a chart that has no continuation,
// so the available immersion data cannot describe the whole component.
class BoundaryEscape : public Error {
 public:
  using Error::Error;
};

// A graph sample contains multi-sheet or uncovered nodes.
class NotAGraph : public Error {
 public:
  using Error::Error;
};

// Bisection found a property that passes at some radius but fails at a
// smaller one.
class MonotonicityViolated : public Error {
 public:
  using Error::Error;
};

// The probe hypothesis of the derivative certificate failed at a node.
class ProbeHypothesisFailed : public Error {
 public:
  ProbeHypothesisFailed(const std::string& what, int probe)
      : Error(what), probe_(probe) {}
  int probe() const { return probe_; }

 private:
  int probe_;
};

}  // namespace tangraph
