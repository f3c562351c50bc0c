#pragma once

#include <stdexcept>
#include <string>

namespace porosity {

// Malformed or out-of-domain input data: missing columns, unparsable cells,
// invariant violations in records. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter or argument combination (out-of-range hyperparameters,
// mismatched sizes, unknown feature names). The CLI maps this to exit code 1.
class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: factorization breakdown, infeasible model output.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace porosity
