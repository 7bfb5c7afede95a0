#pragma once

#include <stdexcept>
#include <string>

namespace cyma {

/// Machine-readable failure categories. The CLI maps these to exit codes,
/// file readers use the io_* values to distinguish malformed inputs.
enum class ErrorCode {
  invalid_field,     // non-finite or structurally broken field data
  grid_mismatch,     // operands live on different grids
  unsupported_spec,  // metric/problem combination not defined
  positivity,        // a form required to be positive is not
  singular_matrix,   // linearization requested at a degenerate point
  iteration_limit,   // solver ran out of iterations
  positivity_collapse,  // no damped Newton step keeps the form positive
  infeasible,        // problem data admits no solution (e.g. nonpositive mass)
  klt_violation,     // singular density fails the integrability requirement
  io_bad_magic,
  io_truncated,
  io_kind_mismatch,
  io_failure,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace cyma
