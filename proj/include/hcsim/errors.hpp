#pragma once

#include <stdexcept>
#include <string>

namespace hcsim {

// Invalid parameters or an unsatisfiable scheme precondition. The CLI maps
// this to exit code 2.
class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A measured schedule disagrees with its closed-form prediction, or a
// schedule violated its own delivery contract. The CLI maps this to exit
// code 3.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

} // namespace hcsim
