#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/spd.hpp"

namespace mdp_dissip {

enum class DissimilarityKind { kl, wasserstein2 };

inline const char* to_string(DissimilarityKind kind) {
  return kind == DissimilarityKind::kl ? "kl" : "w2";
}

struct GaussianMeasure {
  Vector mean;
  SpdMatrix covariance;

  GaussianMeasure(Vector mu, SpdMatrix sigma)
      : mean(std::move(mu)), covariance(std::move(sigma)) {
    if (mean.size() != covariance.dim())
      throw InputError("gaussian measure: mean length " + std::to_string(mean.size()) +
                       " vs covariance dim " + std::to_string(covariance.dim()));
  }

  std::size_t dim() const { return mean.size(); }
};

// One step of the closed-loop state distribution under x+ = a_c x + w.
inline GaussianMeasure propagate(const GaussianMeasure& rho, const Matrix& a_c,
                                 const SpdMatrix& noise_cov) {
  if (!a_c.square() || a_c.rows() != rho.dim() || noise_cov.dim() != rho.dim())
    throw InputError("propagate: shape mismatch");
  Matrix cov = symmetrize(a_c * rho.covariance.matrix() * transpose(a_c) +
                          noise_cov.matrix());
  return GaussianMeasure(a_c * rho.mean, SpdMatrix(cov));
}

// Relative entropy between nondegenerate Gaussians,
//   (tr(S2^-1 S1) + d^T S2^-1 d - n + log det S2 - log det S1) / 2
// with d the mean difference.
inline double kl_divergence(const GaussianMeasure& rho, const GaussianMeasure& target) {
  if (rho.dim() != target.dim()) throw InputError("kl_divergence: dimension mismatch");
  const std::size_t n = rho.dim();
  const SpdMatrix inv = spd_inverse(target.covariance);
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = rho.mean[i] - target.mean[i];
  const double tr = trace(inv.matrix() * rho.covariance.matrix());
  const double quad = quadratic_form(inv, d);
  return 0.5 * (tr + quad - static_cast<double>(n) +
                log_det_spd(target.covariance) - log_det_spd(rho.covariance));
}

struct Wasserstein2Parts {
  double total;            // squared transport distance after whitening
  double covariance_part;  // total minus the mean term
};

// Squared 2-Wasserstein distance to the steady state, computed in whitened
// coordinates (states premultiplied by steady_cov^{-1/2}, so the target
// becomes a standard Gaussian). With psi the whitened covariance,
//   total = mu^T steady_cov^{-1} mu + sum_i (lam_i(psi) + 1 - 2 sqrt(lam_i(psi))).
inline Wasserstein2Parts wasserstein2_parts(const GaussianMeasure& rho,
                                            const SpdMatrix& steady_cov) {
  if (rho.dim() != steady_cov.dim())
    throw InputError("wasserstein2_parts: dimension mismatch");
  const SpdMatrix inv_sqrt = spd_inverse(spd_sqrt(steady_cov));
  const SpdMatrix psi{symmetrize(inv_sqrt.matrix() * rho.covariance.matrix() *
                                 inv_sqrt.matrix())};
  double cov_part = 0.0;
  for (double lam : psi.eigen().values)
    cov_part += lam + 1.0 - 2.0 * std::sqrt(lam);
  const double mean_part = quadratic_form(spd_inverse(steady_cov), rho.mean);
  return Wasserstein2Parts{mean_part + cov_part, cov_part};
}

// Dispatch on the dissimilarity used throughout the certificates. The
// transport branch recenters rho at the target mean so both branches vanish
// exactly at rho == target.
inline double dissimilarity(DissimilarityKind kind, const GaussianMeasure& rho,
                            const GaussianMeasure& target) {
  if (kind == DissimilarityKind::kl) return kl_divergence(rho, target);
  Vector d(rho.mean.size());
  if (rho.dim() != target.dim()) throw InputError("dissimilarity: dimension mismatch");
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rho.mean[i] - target.mean[i];
  return wasserstein2_parts(GaussianMeasure(d, rho.covariance), target.covariance).total;
}

}  // namespace mdp_dissip
