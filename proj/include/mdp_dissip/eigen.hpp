#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"

namespace mdp_dissip {

struct SymEigen {
  Vector values;    // ascending
  Matrix vectors;   // columns, same order as values
};

// Cyclic Jacobi for symmetric matrices. Deterministic sweep order (upper
// triangle, row by row), deterministic sign convention on the eigenvectors,
// so repeated runs on identical input give bit-identical output.
inline SymEigen sym_eigen(const SymMatrix& s) {
  const std::size_t n = s.dim();
  Matrix a = s.matrix();
  Matrix v = Matrix::identity(n);

  const double scale = std::max(1.0, frobenius_norm(a));
  const double tol = 1e-15 * scale;
  const int max_sweeps = 100;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tol) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        // Smaller-angle root of t^2 + 2 t theta - 1 = 0, computed stably.
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps)
    throw ConvergenceError("sym_eigen: Jacobi sweeps exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (a(i, i) != a(j, j)) return a(i, i) < a(j, j);
    return i < j;
  });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = a(src, src);
    // Fix the sign by the largest-magnitude component.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(imax, src))) imax = i;
    const double sign = v(imax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
  }
  return out;
}

// Singular values, descending. Computed from the spectrum of a^T a, which is
// plenty accurate for the well-conditioned small matrices this library sees.
inline Vector singular_values(const Matrix& a) {
  const Matrix gram = symmetrize(transpose(a) * a);
  SymEigen e = sym_eigen(SymMatrix(gram));
  Vector sv(e.values.size());
  for (std::size_t i = 0; i < sv.size(); ++i) {
    const double lam = std::max(0.0, e.values[sv.size() - 1 - i]);
    sv[i] = std::sqrt(lam);
  }
  return sv;
}

// Gelfand estimate of the spectral radius by normalized repeated squaring:
// rho(f) = lim ||f^(2^j)||^(1/2^j). With 48 squarings the estimate is an
// upper bound tight to ~1e-10 even for defective matrices at this scale.
inline double spectral_radius(const Matrix& f) {
  if (!f.square()) throw InputError("spectral_radius: matrix not square");
  const int squarings = 48;
  Matrix g = f;
  double log_norm = 0.0;
  double weight = 1.0;
  for (int j = 0; j <= squarings; ++j) {
    const double s = frobenius_norm(g);
    if (s == 0.0) return 0.0;  // nilpotent
    log_norm += weight * std::log(s);
    if (j == squarings) break;
    g = (1.0 / s) * g;
    g = g * g;
    weight *= 0.5;
  }
  return std::exp(log_norm);
}

}  // namespace mdp_dissip
