#pragma once

#include <stdexcept>
#include <string>

namespace coprime_lab {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments: malformed constraints, out-of-domain parameters.
class invalid_argument : public error {
 public:
  using error::error;
};

// A table, budget, or integer range would be exceeded.
class capacity_error : public error {
 public:
  using error::error;
};

class overflow_error : public capacity_error {
 public:
  using capacity_error::capacity_error;
};

// No closed-form density is available for the requested constraint.
class unsupported_formula : public error {
 public:
  using error::error;
};

// Discrepancy of a set with no members in the reference box.
class undefined_discrepancy : public error {
 public:
  using error::error;
};

}  // namespace coprime_lab
