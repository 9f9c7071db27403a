#pragma once

#include <stdexcept>
#include <string>

namespace stablab {

/// Raised when an argument violates a documented precondition (parameter out
/// of range, mismatched dimensions, level mismatch, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerically well-posed request fails at run time
/// (non-converged quadrature, non-finite partial sum, infeasible fit).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_argument(const std::string& msg) { throw InvalidArgument(msg); }

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace detail
}  // namespace stablab
