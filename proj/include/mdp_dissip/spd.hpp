#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "mdp_dissip/eigen.hpp"
#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"

namespace mdp_dissip {

// Symmetric positive definite matrix. Definiteness is checked at
// construction (smallest eigenvalue above 1e-10 times the largest), and the
// spectral decomposition is kept so sqrt/inverse/log-det reuse it.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  explicit SpdMatrix(const SymMatrix& s) : sym_(s), eigen_(sym_eigen(s)) {
    const double lam_max = eigen_.values.empty() ? 0.0 : eigen_.values.back();
    const double lam_min = eigen_.values.empty() ? 0.0 : eigen_.values.front();
    if (!(lam_max > 0.0) || !(lam_min > 1e-10 * lam_max))
      throw DomainError("spd matrix: not positive definite");
  }

  explicit SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}

  static SpdMatrix identity(std::size_t n) { return SpdMatrix(SymMatrix::identity(n)); }

  std::size_t dim() const { return sym_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return sym_(i, j); }
  const Matrix& matrix() const { return sym_.matrix(); }
  const SymMatrix& sym() const { return sym_; }
  const SymEigen& eigen() const { return eigen_; }

  double min_eigenvalue() const { return eigen_.values.front(); }
  double max_eigenvalue() const { return eigen_.values.back(); }

 private:
  SymMatrix sym_;
  SymEigen eigen_;
};

namespace detail {

// v diag(phi(lambda)) v^T for an already-decomposed matrix.
template <class Fn>
Matrix eigen_map(const SymEigen& e, Fn&& phi) {
  const std::size_t n = e.values.size();
  Matrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double f = phi(e.values[j]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        out(i, k) += f * e.vectors(i, j) * e.vectors(k, j);
  }
  return symmetrize(out);
}

}  // namespace detail

inline SpdMatrix spd_sqrt(const SpdMatrix& s) {
  return SpdMatrix(detail::eigen_map(s.eigen(), [](double l) { return std::sqrt(l); }));
}

inline SpdMatrix spd_inverse(const SpdMatrix& s) {
  return SpdMatrix(detail::eigen_map(s.eigen(), [](double l) { return 1.0 / l; }));
}

inline double log_det_spd(const SpdMatrix& s) {
  double acc = 0.0;
  for (double l : s.eigen().values) acc += std::log(l);
  return acc;
}

inline double quadratic_form(const SpdMatrix& s, const Vector& x) {
  return quadratic_form(s.sym(), x);
}

}  // namespace mdp_dissip
