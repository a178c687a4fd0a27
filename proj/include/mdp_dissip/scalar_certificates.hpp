#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mdp_dissip/eigen.hpp"
#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/spd.hpp"

namespace mdp_dissip {

// Matrix entropy-like functional sum_i (lam_i - log(1 + lam_i)) of a
// symmetric matrix with spectrum above -1. Nonnegative, zero only at zero.
inline double varsigma(const SymMatrix& delta) {
  double acc = 0.0;
  for (double lam : sym_eigen(delta).values) {
    if (lam <= -1.0 + 1e-12)
      throw DomainError("varsigma: eigenvalue " + std::to_string(lam) +
                        " at or below -1");
    acc += lam - std::log1p(lam);
  }
  return acc;
}

// Scalar comparison certificate
//   (1 - b)(x - log(1 + x)) - a x + log(1 + a x)
// which is nonnegative on x > -1 whenever a < 1 and 0 < b <= 1 - a.
inline double vartheta(double a, double b, double x) {
  if (!(x > -1.0)) throw DomainError("vartheta: x must exceed -1");
  if (!(a < 1.0)) throw DomainError("vartheta: requires a < 1");
  if (!(b > 0.0 && b <= 1.0 - a)) throw DomainError("vartheta: requires 0 < b <= 1 - a");
  if (!(a * x > -1.0)) throw DomainError("vartheta: a x must exceed -1");
  return (1.0 - b) * (x - std::log1p(x)) - a * x + std::log1p(a * x);
}

// Transport-cost analogue of vartheta, for h(x) = x - 2 sqrt(1 + x) + 2:
//   (1 - beta) h(x) - h(alpha x) >= 0  on x > -1, 0 < alpha < 1,
//   0 <= beta <= 1 - sqrt(alpha).
inline double g_w2(double alpha, double beta, double x) {
  if (!(x > -1.0)) throw DomainError("g_w2: x must exceed -1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("g_w2: requires 0 < alpha < 1");
  if (!(beta >= 0.0 && beta <= 1.0 - std::sqrt(alpha)))
    throw DomainError("g_w2: requires 0 <= beta <= 1 - sqrt(alpha)");
  const auto h = [](double y) { return y - 2.0 * std::sqrt(1.0 + y) + 2.0; };
  return (1.0 - beta) * h(x) - h(alpha * x);
}

struct ContractionReport {
  // Eigenvalue gaps lam_i(steady_cov^{-1} sigma) - 1 before and after one
  // closed-loop step, matched by ascending-order index.
  std::vector<std::pair<double, double>> gap_pairs;
  // Per-index contraction ratio after/before; NaN where the before-gap is
  // numerically zero (those indices are listed in `skipped`).
  std::vector<double> ratios;
  std::vector<std::size_t> skipped;
  double max_ratio = 0.0;       // over non-skipped indices
  bool sign_preserved = true;   // each surviving gap keeps its sign
  bool bounded = true;          // each surviving ratio lies in (0, sigma_max + 1e-9]
  bool at_fixed_point = false;  // all before-gaps numerically zero

  bool pass() const { return bounded && sign_preserved; }
};

// Checks that one covariance step contracts every spectral gap of
// steady_cov^{-1} sigma toward 1 by a factor of at most sigma_max. The gap
// spectrum is computed symmetrically via psi = s^{-1/2} sigma s^{-1/2}.
inline ContractionReport eigen_contraction_check(const SpdMatrix& sigma_before,
                                                 const SpdMatrix& sigma_after,
                                                 const SpdMatrix& steady_cov,
                                                 double sigma_max) {
  const std::size_t n = steady_cov.dim();
  if (sigma_before.dim() != n || sigma_after.dim() != n)
    throw InputError("eigen_contraction_check: dimension mismatch");
  const SpdMatrix inv_sqrt = spd_inverse(spd_sqrt(steady_cov));
  const auto whiten = [&](const SpdMatrix& s) {
    return sym_eigen(SymMatrix(symmetrize(inv_sqrt.matrix() * s.matrix() *
                                          inv_sqrt.matrix())));
  };
  const SymEigen before = whiten(sigma_before);
  const SymEigen after = whiten(sigma_after);

  ContractionReport rep;
  rep.gap_pairs.resize(n);
  rep.ratios.assign(n, std::numeric_limits<double>::quiet_NaN());
  const double gap_floor = 1e-12;
  std::size_t surviving = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gb = before.values[i] - 1.0;
    const double ga = after.values[i] - 1.0;
    rep.gap_pairs[i] = {gb, ga};
    if (std::abs(gb) <= gap_floor) {
      rep.skipped.push_back(i);
      continue;
    }
    const double ratio = ga / gb;
    rep.ratios[i] = ratio;
    if (surviving == 0 || ratio > rep.max_ratio) rep.max_ratio = ratio;
    ++surviving;
    if (!(ratio > 0.0) || ratio > sigma_max + 1e-9) rep.bounded = false;
    if ((gb > 0.0) != (ga > 0.0)) rep.sign_preserved = false;
  }
  rep.at_fixed_point = surviving == 0;
  return rep;
}

// Lyapunov-style decrease test for a generic spectral dissimilarity
//   d(rho) = mu^T steady_cov^{-1} mu + sum_i zeta(lam_i(steady_cov^{-1} sigma)),
// evaluated along a precomputed trajectory. Strict decrease is required
// until d falls below 1e-12, relative slack 1e-12 per step.
template <class Zeta>
bool generic_decrease_check(Zeta&& zeta, const std::vector<GaussianMeasure>& trajectory,
                            const SpdMatrix& steady_cov) {
  if (trajectory.size() < 2)
    throw InputError("generic_decrease_check: need at least two measures");
  const SpdMatrix inv = spd_inverse(steady_cov);
  const SpdMatrix inv_sqrt = spd_inverse(spd_sqrt(steady_cov));
  const auto value = [&](const GaussianMeasure& rho) {
    double acc = quadratic_form(inv, rho.mean);
    const SymMatrix psi{symmetrize(inv_sqrt.matrix() * rho.covariance.matrix() *
                                   inv_sqrt.matrix())};
    for (double lam : sym_eigen(psi).values) acc += zeta(lam);
    return acc;
  };
  double prev = value(trajectory.front());
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const double cur = value(trajectory[k]);
    if (prev >= 1e-12 && !(cur < prev * (1.0 - 1e-12))) return false;
    prev = cur;
  }
  return true;
}

// One-step decrease certificate for the entropy functional: with
// sigma_max(m) < 1 and 0 < beta <= 1 - sigma_max(m),
//   (1 - beta) varsigma(delta) - varsigma(m delta m^T) >= 0.
// Returns the left side; a value below -1e-10 is a certificate failure.
inline double entropy_step_check(const SymMatrix& delta, const Matrix& m, double beta) {
  if (!m.square() || m.rows() != delta.dim())
    throw InputError("entropy_step_check: shape mismatch");
  const double sigma_max = singular_values(m).front();
  if (!(sigma_max < 1.0)) throw DomainError("entropy_step_check: sigma_max(m) must be below 1");
  if (!(beta > 0.0 && beta <= 1.0 - sigma_max))
    throw DomainError("entropy_step_check: requires 0 < beta <= 1 - sigma_max(m)");
  const double before = varsigma(delta);
  const double after = varsigma(SymMatrix(symmetrize(m * delta.matrix() * transpose(m))));
  const double lhs = (1.0 - beta) * before - after;
  if (lhs < -1e-10)
    throw CertificationError("entropy_step_check: decrease certificate violated, lhs = " +
                             std::to_string(lhs));
  return lhs;
}

}  // namespace mdp_dissip
