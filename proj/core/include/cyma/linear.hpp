#pragma once

#include <functional>
#include <vector>

namespace cyma {

/// Result of an iterative linear solve.
struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

using LinearOp = std::function<std::vector<double>(const std::vector<double>&)>;

/// Preconditioned BiCGStab for general (nonsymmetric) operators.
/// Solves op(x) = rhs to ||rhs - op(x)|| <= rel_tol * ||rhs||.
KrylovResult bicgstab(const LinearOp& op, const LinearOp& precond,
                      const std::vector<double>& rhs, std::vector<double>& x,
                      double rel_tol, int max_iter);

}  // namespace cyma
