#pragma once

#include <stdexcept>
#include <string>

namespace freehaus {

// A measure specification that violates its invariants, or one that does not
// meet the requirements of the operation it was passed to.
class InvalidMeasure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Logarithmic energy that diverged or failed to converge where a finite value
// is required.
class EnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The orbit-neighborhood parameter equation has no root in (0, 1/2).
class NoSolution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace freehaus
