#pragma once

#include <cstddef>
#include <string>

#include "mdp_dissip/eigen.hpp"
#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/spd.hpp"

namespace mdp_dissip {

struct RiccatiSolution {
  SpdMatrix value;  // stationary quadratic value weight
  Matrix gain;      // optimal linear feedback, state -> input
};

namespace detail {

// [[t, u^T], [u, r]] stacked into one (n+m) x (n+m) block matrix.
inline Matrix stack_cost_blocks(const SymMatrix& t, const Matrix& u, const SymMatrix& r) {
  const std::size_t n = t.dim(), m = r.dim();
  Matrix h(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = t(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      h(n + i, j) = u(i, j);
      h(j, n + i) = u(i, j);
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) h(n + i, n + j) = r(i, j);
  return h;
}

}  // namespace detail

// Stationary solution of the discrete Riccati recursion with cross weight:
//   p = t + a^T p a - (b^T p a + u)^T (r + b^T p b)^{-1} (b^T p a + u)
// found by iterating the recursion from p = t. Monotone and convergent
// whenever (a, b) is stabilizable and the stacked cost weight is positive
// definite; divergence or a non-contractive closed loop is reported instead
// of returned.
inline RiccatiSolution solve_discrete_riccati(const Matrix& a, const Matrix& b,
                                              const SymMatrix& t, const Matrix& u,
                                              const SymMatrix& r,
                                              const FixedPointOptions& opts = {}) {
  const std::size_t n = a.rows(), m = b.cols();
  if (!a.square() || b.rows() != n || t.dim() != n || r.dim() != m ||
      u.rows() != m || u.cols() != n)
    throw InputError("discrete riccati: shape mismatch");
  try {
    (void)SpdMatrix(detail::stack_cost_blocks(t, u, r));
  } catch (const DomainError&) {
    throw DomainError("discrete riccati: stacked cost weight not positive definite");
  }

  const Matrix at = transpose(a);
  const Matrix bt = transpose(b);
  Matrix p = t.matrix();
  Matrix k(m, n);
  bool converged = false;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const SpdMatrix g{symmetrize(r.matrix() + bt * p * b)};
    const Matrix s = bt * p * a + u;
    k = spd_inverse(g).matrix() * s;
    Matrix next = symmetrize(t.matrix() + at * p * a - transpose(s) * k);
    const double step = max_abs(next - p);
    if (max_abs(next) > 1e100)
      throw StabilizabilityError("discrete riccati: iteration diverged");
    p = next;
    if (step <= opts.step_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw StabilizabilityError("discrete riccati: no convergence within " +
                               std::to_string(opts.max_iterations) + " iterations");

  // Recompute the gain at the fixed point and insist the loop it closes is
  // a strict contraction.
  const SpdMatrix g{symmetrize(r.matrix() + bt * p * b)};
  k = spd_inverse(g).matrix() * (bt * p * a + u);
  const double rho = spectral_radius(a - b * k);
  if (rho >= 1.0 - 1e-10)
    throw StabilizabilityError("discrete riccati: closed loop not contractive, rho = " +
                               std::to_string(rho));
  return RiccatiSolution{SpdMatrix(p), k};
}

}  // namespace mdp_dissip
