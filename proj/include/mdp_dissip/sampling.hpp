#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "mdp_dissip/errors.hpp"
#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/matrix.hpp"
#include "mdp_dissip/spd.hpp"

namespace mdp_dissip {

// SplitMix64 step, used to spread a base seed over per-case streams so a
// sweep gives the same samples regardless of how it is chunked.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random source. The engine is the standard mt19937_64 but the
// real-valued mappings are fixed here rather than delegated to
// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform(double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw InputError("log_uniform: need 0 < lo <= hi");
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  std::uint64_t integer() { return engine_(); }

  // Uniform integer in [0, n) by rejection-free scaling; fine for the small
  // n used here.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Random orthogonal matrix: uniform entries orthonormalized by Gram-Schmidt,
// re-drawing any column that collapses.
inline Matrix random_orthogonal(Rng& rng, std::size_t n) {
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Vector col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = rng.uniform(-1.0, 1.0);
      for (std::size_t prev = 0; prev < j; ++prev) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += col[i] * q(i, prev);
        for (std::size_t i = 0; i < n; ++i) col[i] -= proj * q(i, prev);
      }
      double norm = 0.0;
      for (double v : col) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / norm;
        break;
      }
      if (attempt == 63) throw ConvergenceError("random_orthogonal: degenerate draws");
    }
  }
  return q;
}

// Random covariance q diag(lam) q^T with log-uniform eigenvalues, exactly
// symmetrized.
inline SpdMatrix random_spd(Rng& rng, std::size_t n, double eig_lo, double eig_hi) {
  const Matrix q = random_orthogonal(rng, n);
  Vector lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = rng.log_uniform(eig_lo, eig_hi);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) s(i, j) += lam[k] * q(i, k) * q(j, k);
  return SpdMatrix(symmetrize(s));
}

inline GaussianMeasure random_measure(Rng& rng, std::size_t n, double mean_lo,
                                      double mean_hi, double eig_lo, double eig_hi) {
  Vector mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = rng.uniform(mean_lo, mean_hi);
  return GaussianMeasure(std::move(mu), random_spd(rng, n, eig_lo, eig_hi));
}

}  // namespace mdp_dissip
