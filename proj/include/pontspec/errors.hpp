#pragma once

#include <stdexcept>

namespace pontspec {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Hypotheses of an operation are not met (bad configuration, unstable step, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iteration that should always converge did not; indicates a kernel bug.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gamma matrix is singular at the requested spectral parameter
// (an eigenvalue, resonance or zero-energy resonance sits there).
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A level scan skipped a node index.
class MissingLevelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pontspec
