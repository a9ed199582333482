#pragma once

#include <stdexcept>
#include <string>

namespace minsnap {

// Thrown when a factorization or solve breaks down (singular pivot,
// indefinite reduced Hessian, ...). Distinct from std::invalid_argument,
// which is reserved for malformed inputs detected before any numerics run.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace minsnap
