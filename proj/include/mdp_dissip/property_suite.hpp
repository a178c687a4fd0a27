#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mdp_dissip/lqr.hpp"
#include "mdp_dissip/sampling.hpp"
#include "mdp_dissip/scalar_certificates.hpp"
#include "mdp_dissip/sweep.hpp"

namespace mdp_dissip {

// Randomized and gridded checks of the building blocks behind the
// dissipation inequality, all evaluated against a concrete certificate.
struct PropertySuiteReport {
  // Spectral-gap contraction under one covariance step.
  std::size_t contraction_cases = 0;
  std::size_t contraction_failures = 0;
  double contraction_max_ratio = 0.0;

  // Monotone decrease of generic spectral dissimilarities along trajectories.
  std::size_t decrease_cases = 0;
  std::size_t decrease_failures = 0;

  // One-step decrease certificate for the entropy functional.
  std::size_t entropy_step_cases = 0;
  std::size_t entropy_step_failures = 0;
  double entropy_step_min = std::numeric_limits<double>::infinity();

  // Scalar certificate grids.
  std::size_t vartheta_points = 0;
  double vartheta_min = std::numeric_limits<double>::infinity();
  std::size_t g_w2_points = 0;
  double g_w2_min = std::numeric_limits<double>::infinity();

  // Structural residuals of the certificate itself.
  double whitening_residual = 0.0;     // || m m^T + n - id ||max
  double storage_residual = 0.0;       // adjoint fixed-point equation of omega
  double steady_state_residual = 0.0;  // covariance fixed point

  bool pass() const {
    return contraction_failures == 0 && decrease_failures == 0 &&
           entropy_step_failures == 0 && vartheta_min >= -1e-12 &&
           g_w2_min >= -1e-12 && whitening_residual <= 1e-9 &&
           storage_residual <= 1e-9 && steady_state_residual <= 1e-9;
  }
};

// Max-norm defects of the three structural identities a certificate claims:
// whitening (m m^T + n = id), the adjoint fixed point of the storage weight,
// and the steady-state covariance fixed point.
struct CertificateResiduals {
  double whitening = 0.0;
  double storage_fixed_point = 0.0;
  double steady_state = 0.0;

  bool pass(double tol = 1e-9) const {
    return whitening <= tol && storage_fixed_point <= tol && steady_state <= tol;
  }
};

inline CertificateResiduals certificate_residuals(const LqrCertificate& cert) {
  CertificateResiduals res;
  const std::size_t n = cert.dim();
  const Matrix& m = cert.whitened_closed_loop;
  res.whitening =
      max_abs(m * transpose(m) + cert.whitened_noise.matrix() - Matrix::identity(n));
  const Matrix source =
      cert.sqrt_cov.matrix() * cert.cost_weight.matrix() * cert.sqrt_cov.matrix();
  res.storage_fixed_point = max_abs(transpose(m) * cert.storage_weight.matrix() * m -
                                    cert.storage_weight.matrix() + source);
  res.steady_state =
      max_abs(cert.closed_loop * cert.steady_state_cov.matrix() *
                  transpose(cert.closed_loop) +
              cert.noise_cov.matrix() - cert.steady_state_cov.matrix());
  return res;
}

// Runs the full randomized suite. Counts are fixed; the seed only moves the
// sampled cases. Covariances are drawn around the steady-state scale, the
// same ranges the dissipation sweep uses.
inline PropertySuiteReport run_property_suite(const LqrCertificate& cert,
                                              std::uint64_t seed) {
  PropertySuiteReport rep;
  const std::size_t n = cert.dim();
  const SweepConfig ranges = default_sweep_config(cert, 1, seed);

  const CertificateResiduals res = certificate_residuals(cert);
  rep.whitening_residual = res.whitening;
  rep.storage_residual = res.storage_fixed_point;
  rep.steady_state_residual = res.steady_state;

  // Contraction of every whitened spectral gap by at most sigma_max.
  rep.contraction_cases = 500;
  for (std::size_t i = 0; i < rep.contraction_cases; ++i) {
    Rng rng(splitmix64(seed ^ splitmix64(0x100000 + i)));
    const SpdMatrix sigma = random_spd(rng, n, ranges.eig_low, ranges.eig_high);
    const SpdMatrix next{symmetrize(cert.closed_loop * sigma.matrix() *
                                    transpose(cert.closed_loop) +
                                    cert.noise_cov.matrix())};
    const ContractionReport c =
        eigen_contraction_check(sigma, next, cert.steady_state_cov, cert.sigma_max);
    if (!c.pass()) ++rep.contraction_failures;
    if (!c.at_fixed_point)
      rep.contraction_max_ratio = std::max(rep.contraction_max_ratio, c.max_ratio);
  }

  // Strict decrease of both spectral dissimilarities along closed-loop runs.
  const auto zeta_kl = [](double l) { return l - 1.0 - std::log(l); };
  const auto zeta_w2 = [](double l) { return l + 1.0 - 2.0 * std::sqrt(l); };
  rep.decrease_cases = 100;
  for (std::size_t i = 0; i < rep.decrease_cases; ++i) {
    Rng rng(splitmix64(seed ^ splitmix64(0x200000 + i)));
    GaussianMeasure rho = random_measure(rng, n, ranges.mean_low, ranges.mean_high,
                                         ranges.eig_low, ranges.eig_high);
    std::vector<GaussianMeasure> traj;
    traj.reserve(41);
    traj.push_back(rho);
    for (int k = 0; k < 40; ++k) {
      rho = propagate(rho, cert.closed_loop, cert.noise_cov);
      traj.push_back(rho);
    }
    const bool ok = generic_decrease_check(zeta_kl, traj, cert.steady_state_cov) &&
                    generic_decrease_check(zeta_w2, traj, cert.steady_state_cov);
    if (!ok) ++rep.decrease_failures;
  }

  // One-step entropy decrease under the whitened loop.
  rep.entropy_step_cases = 500;
  for (std::size_t i = 0; i < rep.entropy_step_cases; ++i) {
    Rng rng(splitmix64(seed ^ splitmix64(0x300000 + i)));
    const SpdMatrix psi = random_spd(rng, n, 0.05, 20.0);
    Matrix delta = psi.matrix();
    for (std::size_t d = 0; d < n; ++d) delta(d, d) -= 1.0;
    const double beta = rng.uniform(1e-6, 1.0 - cert.sigma_max);
    try {
      const double lhs = entropy_step_check(SymMatrix(delta), cert.whitened_closed_loop, beta);
      rep.entropy_step_min = std::min(rep.entropy_step_min, lhs);
    } catch (const CertificationError&) {
      ++rep.entropy_step_failures;
    }
  }

  // Scalar certificate grids, denser than 1e4 points each.
  for (int ia = 0; ia < 25; ++ia) {
    const double a = 0.01 + (0.98 * ia) / 24.0;
    for (int ib = 1; ib <= 20; ++ib) {
      const double b = std::min((1.0 - a) * ib / 20.0, 1.0 - a);
      for (int ix = 0; ix < 25; ++ix) {
        const double x = -0.999 + (50.0 + 0.999) * ix / 24.0;
        rep.vartheta_min = std::min(rep.vartheta_min, vartheta(a, b, x));
        ++rep.vartheta_points;
      }
    }
  }
  for (int ia = 0; ia < 25; ++ia) {
    const double alpha = 0.01 + (0.98 * ia) / 24.0;
    for (int ib = 0; ib < 20; ++ib) {
      const double beta = std::min((1.0 - std::sqrt(alpha)) * ib / 19.0,
                                   1.0 - std::sqrt(alpha));
      for (int ix = 0; ix < 25; ++ix) {
        const double x = -0.999 + (50.0 + 0.999) * ix / 24.0;
        rep.g_w2_min = std::min(rep.g_w2_min, g_w2(alpha, beta, x));
        ++rep.g_w2_points;
      }
    }
  }
  return rep;
}

}  // namespace mdp_dissip
