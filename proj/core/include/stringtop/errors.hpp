#pragma once

#include <stdexcept>
#include <string>

namespace stringtop {

/// Inconsistent setup: mismatched generator counts, dimensions, unsatisfiable
/// configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input data violating a documented invariant (loops, fields, diagrams,
/// transition data).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two loops meet non-transversally: overlapping or parallel touching
/// segments, or a vertex lying on the other loop.
class TransversalityError : public std::runtime_error {
public:
  TransversalityError(const std::string &what, int segment, int other_segment)
      : std::runtime_error(what), segment_(segment),
        other_segment_(other_segment) {}

  int segment() const noexcept { return segment_; }
  int other_segment() const noexcept { return other_segment_; }

private:
  int segment_;
  int other_segment_;
};

/// {S;S} != 0; carries the norm of the residual.
class MasterEquationError : public std::runtime_error {
public:
  MasterEquationError(const std::string &what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Richardson refinement hit the step cap before reaching the tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string &what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

} // namespace stringtop
