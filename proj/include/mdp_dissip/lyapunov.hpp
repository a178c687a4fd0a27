#pragma once

#include <cstddef>
#include <string>

#include "mdp_dissip/eigen.hpp"
#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"

namespace mdp_dissip {

struct FixedPointOptions {
  double step_tolerance = 1e-12;  // max-norm change between iterates
  std::size_t max_iterations = 10000;
};

// Solves x = f x f^T + q by the contraction map itself, starting from q.
// Requires rho(f) < 1; each step is exact in the limit because the map is a
// rho(f)^2-contraction in any induced norm, so the stopping rule on the step
// size bounds the true error by step / (1 - rho^2).
inline SymMatrix solve_discrete_lyapunov(const Matrix& f, const SymMatrix& q,
                                         const FixedPointOptions& opts = {}) {
  if (!f.square() || f.rows() != q.dim())
    throw InputError("discrete lyapunov: shape mismatch");
  const double rho = spectral_radius(f);
  if (rho >= 1.0 - 1e-10)
    throw InstabilityError("discrete lyapunov: spectral radius " +
                           std::to_string(rho) + " not below one");

  const Matrix ft = transpose(f);
  Matrix x = q.matrix();
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    Matrix next = symmetrize(f * x * ft + q.matrix());
    const double step = max_abs(next - x);
    x = next;
    if (step <= opts.step_tolerance) return SymMatrix(x);
  }
  throw ConvergenceError("discrete lyapunov: no convergence within " +
                         std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace mdp_dissip
