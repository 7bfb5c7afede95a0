#include "cyma/linear.hpp"

#include <cmath>

namespace cyma {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

KrylovResult bicgstab(const LinearOp& op, const LinearOp& precond,
                      const std::vector<double>& rhs, std::vector<double>& x,
                      double rel_tol, int max_iter) {
  const std::size_t n = rhs.size();
  if (x.size() != n) x.assign(n, 0.0);

  std::vector<double> r = op(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  const double rhs_norm = norm(rhs);
  if (rhs_norm == 0.0) {
    x.assign(n, 0.0);
    return {true, 0, 0.0};
  }

  std::vector<double> r0 = r;
  std::vector<double> p(n, 0.0), v(n, 0.0);
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  KrylovResult result;
  for (int it = 0; it < max_iter; ++it) {
    const double res = norm(r) / rhs_norm;
    result.iterations = it;
    result.relative_residual = res;
    if (res <= rel_tol) {
      result.converged = true;
      return result;
    }
    const double rho_new = dot(r0, r);
    if (std::abs(rho_new) < 1e-300) break;
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho_new;

    std::vector<double> ph = precond(p);
    v = op(ph);
    const double r0v = dot(r0, v);
    if (std::abs(r0v) < 1e-300) break;
    alpha = rho / r0v;

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm(s) / rhs_norm <= rel_tol) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
      result.converged = true;
      result.relative_residual = norm(s) / rhs_norm;
      result.iterations = it + 1;
      return result;
    }

    std::vector<double> sh = precond(s);
    std::vector<double> t = op(sh);
    const double tt = dot(t, t);
    if (tt < 1e-300) break;
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    if (std::abs(omega) < 1e-300) break;
  }
  result.relative_residual = norm(r) / rhs_norm;
  result.converged = result.relative_residual <= rel_tol;
  return result;
}

}  // namespace cyma
