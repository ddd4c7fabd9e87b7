#pragma once

#include <stdexcept>
#include <string>

namespace clustertree {

// Input does not conform to a documented schema (bad JSON shape, missing field).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition does not hold (dimension mismatch, nonpositive
// level, complex not in the required class, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An internal invariant was violated. Never expected on valid input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace clustertree
