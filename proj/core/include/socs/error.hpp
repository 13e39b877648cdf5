#pragma once

#include <stdexcept>
#include <string>

namespace socs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An enumeration or state-space cap was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// LP infeasible/unbounded or iteration cap reached.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace socs
