#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/lyapunov.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/riccati.hpp"
#include "mdp_dissip/scalar_certificates.hpp"
#include "mdp_dissip/spd.hpp"

namespace mdp_dissip {

// Linear dynamics x+ = a x + b u + w with quadratic stage cost
// [x; u]^T [[state_cost, cross_cost^T], [cross_cost, input_cost]] [x; u]
// and Gaussian process noise.
struct LqrProblem {
  Matrix dynamics;      // a, n x n
  Matrix input_map;     // b, n x m
  SymMatrix state_cost; // t
  Matrix cross_cost;    // u, m x n
  SymMatrix input_cost; // r
  SpdMatrix noise_cov;  // sigma_w

  LqrProblem(Matrix a, Matrix b, SymMatrix t, Matrix u, SymMatrix r, SpdMatrix sigma_w)
      : dynamics(std::move(a)),
        input_map(std::move(b)),
        state_cost(std::move(t)),
        cross_cost(std::move(u)),
        input_cost(std::move(r)),
        noise_cov(std::move(sigma_w)) {
    const std::size_t n = dynamics.rows(), m = input_map.cols();
    if (!dynamics.square() || input_map.rows() != n || state_cost.dim() != n ||
        input_cost.dim() != m || cross_cost.rows() != m || cross_cost.cols() != n ||
        noise_cov.dim() != n)
      throw InputError("lqr problem: inconsistent dimensions");
    try {
      (void)SpdMatrix(detail::stack_cost_blocks(state_cost, cross_cost, input_cost));
    } catch (const DomainError&) {
      throw DomainError("lqr problem: stacked cost weight not positive definite");
    }
  }

  std::size_t state_dim() const { return dynamics.rows(); }
  std::size_t input_dim() const { return input_map.cols(); }
};

// Everything needed to state and check the long-run dissipation inequality
// for an optimally controlled linear system: the optimal loop, its steady
// state, the whitened contraction, a storage weight, and the scalar
// constants entering the entropy and transport bounds.
struct LqrCertificate {
  Matrix gain;                   // k, optimal feedback
  Matrix closed_loop;            // a - b k
  SpdMatrix noise_cov;           // sigma_w, kept for propagation
  SpdMatrix cost_weight;         // w: stage cost of the closed loop is E[x^T w x]
  SpdMatrix steady_state_cov;    // fixed point of the covariance recursion
  double steady_state_cost;      // tr(w steady_state_cov), the optimal long-run average
  Matrix whitened_closed_loop;   // m = s^{-1/2} (a - b k) s^{1/2}
  SpdMatrix whitened_noise;      // n = s^{-1/2} sigma_w s^{-1/2}, so m m^T + n = identity
  SymMatrix storage_weight;      // omega, solves m^T omega m - omega + s^{1/2} w s^{1/2} = 0
  double sigma_max;              // largest singular value of m, below one
  double beta_kl, kappa_kl, varrho_kl;
  double beta_w2, kappa_w2, varrho_w2;

  // Cached transforms of the steady-state covariance.
  SpdMatrix sqrt_cov, inv_sqrt_cov, inv_cov;

  GaussianMeasure steady_state() const {
    return GaussianMeasure(Vector(steady_state_cov.dim(), 0.0), steady_state_cov);
  }

  double varrho(DissimilarityKind kind) const {
    return kind == DissimilarityKind::kl ? varrho_kl : varrho_w2;
  }

  std::size_t dim() const { return steady_state_cov.dim(); }
};

// Builds the dissipation certificate for an LQR problem: solves the Riccati
// equation, closes the loop, finds the stationary covariance, whitens, and
// derives the storage weight plus all scalar constants. Fails loudly if any
// structural property (contraction, definiteness) does not hold.
inline LqrCertificate certify(const LqrProblem& prob) {
  const RiccatiSolution ric = solve_discrete_riccati(
      prob.dynamics, prob.input_map, prob.state_cost, prob.cross_cost, prob.input_cost);
  const Matrix k = ric.gain;
  const Matrix a_c = prob.dynamics - prob.input_map * k;

  // w = [i; -k]^T h [i; -k] written out block-wise.
  const Matrix kt = transpose(k);
  Matrix w_raw = prob.state_cost.matrix() - kt * prob.cross_cost -
                 transpose(prob.cross_cost) * k + kt * prob.input_cost.matrix() * k;
  SpdMatrix w{symmetrize(w_raw)};

  SpdMatrix steady{solve_discrete_lyapunov(a_c, prob.noise_cov.sym()).matrix()};
  const double steady_cost = trace(w.matrix() * steady.matrix());

  const SpdMatrix sqrt_cov = spd_sqrt(steady);
  const SpdMatrix inv_sqrt_cov = spd_inverse(sqrt_cov);
  const SpdMatrix inv_cov = spd_inverse(steady);

  const Matrix m = inv_sqrt_cov.matrix() * a_c * sqrt_cov.matrix();
  SpdMatrix whitened_noise{symmetrize(inv_sqrt_cov.matrix() * prob.noise_cov.matrix() *
                                      inv_sqrt_cov.matrix())};

  const double sigma_max = singular_values(m).front();
  if (!(sigma_max < 1.0 - 1e-12))
    throw CertificationError("certify: whitened loop not a strict contraction, " +
                             std::to_string(sigma_max));

  // Storage weight from the adjoint Lyapunov equation
  //   m^T omega m - omega + s^{1/2} w s^{1/2} = 0,
  // the orientation under which tr(omega delta) telescopes against
  // tr(w (sigma - steady)) along the covariance recursion.
  const SymMatrix source{symmetrize(sqrt_cov.matrix() * w.matrix() * sqrt_cov.matrix())};
  const SymMatrix omega = solve_discrete_lyapunov(transpose(m), source);

  LqrCertificate cert{
      k,
      a_c,
      prob.noise_cov,
      w,
      steady,
      steady_cost,
      m,
      whitened_noise,
      omega,
      sigma_max,
      /*beta_kl=*/1.0 - sigma_max,
      /*kappa_kl=*/1.0 / (2.0 * (1.0 - sigma_max)),
      /*varrho_kl=*/w.min_eigenvalue() * steady.min_eigenvalue(),
      /*beta_w2=*/1.0 - std::sqrt(sigma_max),
      /*kappa_w2=*/1.0 / (1.0 - std::sqrt(sigma_max)),
      /*varrho_w2=*/0.0,
      sqrt_cov,
      inv_sqrt_cov,
      inv_cov};
  // Transport bound constant: kappa_w2 * beta_w2 covers the covariance part,
  // the mean part needs half the entropy constant.
  cert.varrho_w2 = std::min(cert.kappa_w2 * cert.beta_w2, 0.5 * cert.varrho_kl);
  return cert;
}

namespace detail {

// Whitened covariance gap delta = s^{-1/2} sigma s^{-1/2} - identity.
inline SymMatrix whitened_gap(const GaussianMeasure& rho, const LqrCertificate& cert) {
  Matrix psi = symmetrize(cert.inv_sqrt_cov.matrix() * rho.covariance.matrix() *
                          cert.inv_sqrt_cov.matrix());
  for (std::size_t i = 0; i < psi.rows(); ++i) psi(i, i) -= 1.0;
  return SymMatrix(psi);
}

}  // namespace detail

// Expected stage cost of the closed loop under rho, relative to its
// steady-state value: E[x^T w x] - tr(w steady_cov)
//                    = mu^T w mu + tr(w (sigma - steady_cov)).
inline double stage_cost_functional(const GaussianMeasure& rho, const LqrCertificate& cert) {
  if (rho.dim() != cert.dim()) throw InputError("stage_cost_functional: dimension mismatch");
  return quadratic_form(cert.cost_weight, rho.mean) +
         trace(cert.cost_weight.matrix() *
               (rho.covariance.matrix() - cert.steady_state_cov.matrix()));
}

// Entropy-route storage: kappa_kl varsigma(delta) - tr(omega delta).
inline double storage_kl(const GaussianMeasure& rho, const LqrCertificate& cert) {
  if (rho.dim() != cert.dim()) throw InputError("storage_kl: dimension mismatch");
  const SymMatrix delta = detail::whitened_gap(rho, cert);
  return cert.kappa_kl * varsigma(delta) -
         trace(cert.storage_weight.matrix() * delta.matrix());
}

// Transport-route storage: kappa_w2 * (covariance part of the whitened
// squared transport distance) - tr(omega delta).
inline double storage_w2(const GaussianMeasure& rho, const LqrCertificate& cert) {
  if (rho.dim() != cert.dim()) throw InputError("storage_w2: dimension mismatch");
  const SymMatrix delta = detail::whitened_gap(rho, cert);
  const double cov_part = wasserstein2_parts(rho, cert.steady_state_cov).covariance_part;
  return cert.kappa_w2 * cov_part - trace(cert.storage_weight.matrix() * delta.matrix());
}

inline double storage(const GaussianMeasure& rho, const LqrCertificate& cert,
                      DissimilarityKind kind) {
  return kind == DissimilarityKind::kl ? storage_kl(rho, cert) : storage_w2(rho, cert);
}

// Stage cost rotated by the storage differences along one closed-loop step:
//   rotated(rho) = stage(rho) - storage(rho+) + storage(rho).
inline double rotated_cost(const GaussianMeasure& rho, const LqrCertificate& cert,
                           DissimilarityKind kind) {
  const GaussianMeasure next = propagate(rho, cert.closed_loop, cert.noise_cov);
  return stage_cost_functional(rho, cert) - storage(next, cert, kind) +
         storage(rho, cert, kind);
}

// Dissimilarity to the steady state used by the dissipation inequality.
inline double dissimilarity_to_steady(const GaussianMeasure& rho,
                                      const LqrCertificate& cert, DissimilarityKind kind) {
  if (kind == DissimilarityKind::kl) return kl_divergence(rho, cert.steady_state());
  return wasserstein2_parts(rho, cert.steady_state_cov).total;
}

// rotated(rho) - varrho * d(rho, steady state); nonnegative when the
// dissipation inequality holds at rho.
inline double dissipativity_margin(const GaussianMeasure& rho, const LqrCertificate& cert,
                                   DissimilarityKind kind) {
  return rotated_cost(rho, cert, kind) -
         cert.varrho(kind) * dissimilarity_to_steady(rho, cert, kind);
}

struct TrajectoryRecord {
  std::size_t step;
  GaussianMeasure measure;
  double stage_cost;
  double storage;
  double rotated_cost;
  double d_kl;
  double w2;
  double bound;  // varrho times the dissimilarity matching `kind`
};

// Rolls the closed-loop distribution forward and evaluates the certificate
// functionals at every step, including the final state (steps + 1 records).
inline std::vector<TrajectoryRecord> simulate_trajectory(const GaussianMeasure& rho0,
                                                         const LqrCertificate& cert,
                                                         std::size_t steps,
                                                         DissimilarityKind kind) {
  if (rho0.dim() != cert.dim()) throw InputError("simulate_trajectory: dimension mismatch");
  if (steps < 1) throw InputError("simulate_trajectory: steps must be at least 1");
  std::vector<TrajectoryRecord> records;
  records.reserve(steps + 1);
  GaussianMeasure rho = rho0;
  for (std::size_t k = 0; k <= steps; ++k) {
    TrajectoryRecord rec{k,
                         rho,
                         stage_cost_functional(rho, cert),
                         storage(rho, cert, kind),
                         rotated_cost(rho, cert, kind),
                         kl_divergence(rho, cert.steady_state()),
                         wasserstein2_parts(rho, cert.steady_state_cov).total,
                         0.0};
    rec.bound = cert.varrho(kind) * (kind == DissimilarityKind::kl ? rec.d_kl : rec.w2);
    records.push_back(rec);
    if (k < steps) rho = propagate(rho, cert.closed_loop, cert.noise_cov);
  }
  return records;
}

}  // namespace mdp_dissip
