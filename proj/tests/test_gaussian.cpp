#include <cmath>

#include <gtest/gtest.h>

#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/sampling.hpp"
#include "mdp_dissip/scalar_certificates.hpp"

namespace md = mdp_dissip;

TEST(GaussianMeasure, ValidatesDimensions) {
  EXPECT_THROW(md::GaussianMeasure({1.0, 2.0}, md::SpdMatrix::identity(3)),
               md::InputError);
  const md::GaussianMeasure rho({1.0, 2.0}, md::SpdMatrix::identity(2));
  EXPECT_EQ(rho.dim(), 2u);
}

TEST(Propagate, MatchesHandComputation) {
  const md::Matrix a{{0.5, 0.0}, {0.0, -0.5}};
  const md::SpdMatrix noise{md::Matrix{{1.0, 0.0}, {0.0, 2.0}}};
  const md::GaussianMeasure rho({2.0, 4.0}, md::SpdMatrix{md::Matrix{{4.0, 0.0}, {0.0, 4.0}}});
  const md::GaussianMeasure next = md::propagate(rho, a, noise);
  EXPECT_DOUBLE_EQ(next.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(next.mean[1], -2.0);
  EXPECT_NEAR(next.covariance(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(next.covariance(1, 1), 3.0, 1e-14);
  EXPECT_THROW(md::propagate(rho, md::Matrix(3, 3), noise), md::InputError);
}

TEST(Propagate, KeepsCovariancesDefiniteUnderLongRuns) {
  md::Rng rng(41);
  // singular closed loop: rank-deficient first term, noise keeps it definite
  const md::Matrix a{{0.9, 0.4}, {0.45, 0.2}};
  const md::SpdMatrix noise{md::Matrix{{0.3, 0.1}, {0.1, 0.2}}};
  for (int rep = 0; rep < 100; ++rep) {
    md::GaussianMeasure rho = md::random_measure(rng, 2, -3.0, 3.0, 0.01, 10.0);
    for (int k = 0; k < 50; ++k) rho = md::propagate(rho, a, noise);
    EXPECT_GT(rho.covariance.min_eigenvalue(), 0.0);
  }
}

TEST(KlDivergence, OneDimensionalClosedForm) {
  const double mu = 1.3, var = 0.7, steady = 2.2;
  const md::GaussianMeasure rho({mu}, md::SpdMatrix{md::Matrix{{var}}});
  const md::GaussianMeasure target({0.0}, md::SpdMatrix{md::Matrix{{steady}}});
  const double expected =
      0.5 * (var / steady + mu * mu / steady - 1.0 + std::log(steady / var));
  EXPECT_NEAR(md::kl_divergence(rho, target), expected, 1e-13);
}

TEST(KlDivergence, ZeroAtTargetAndNonnegative) {
  md::Rng rng(43);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.index(4);
    const md::GaussianMeasure rho = md::random_measure(rng, n, -4.0, 4.0, 0.05, 15.0);
    const md::GaussianMeasure target = md::random_measure(rng, n, -4.0, 4.0, 0.05, 15.0);
    EXPECT_GE(md::kl_divergence(rho, target), -1e-12);
    EXPECT_NEAR(md::kl_divergence(rho, rho), 0.0, 1e-12);
  }
  EXPECT_THROW(md::kl_divergence(md::GaussianMeasure({0.0}, md::SpdMatrix::identity(1)),
                                 md::GaussianMeasure({0.0, 0.0}, md::SpdMatrix::identity(2))),
               md::InputError);
}

// Relative entropy to a centered target splits into a mean term and the
// entropy functional of the whitened covariance gap.
TEST(KlDivergence, SplitsIntoMeanAndSpectralParts) {
  md::Rng rng(47);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.index(4);
    const md::SpdMatrix steady = md::random_spd(rng, n, 0.2, 5.0);
    const md::GaussianMeasure rho = md::random_measure(rng, n, -4.0, 4.0, 0.05, 15.0);
    const md::GaussianMeasure target(md::Vector(n, 0.0), steady);

    const md::SpdMatrix inv_sqrt = md::spd_inverse(md::spd_sqrt(steady));
    md::Matrix delta = symmetrize(inv_sqrt.matrix() * rho.covariance.matrix() *
                                  inv_sqrt.matrix());
    for (std::size_t i = 0; i < n; ++i) delta(i, i) -= 1.0;

    const double split =
        0.5 * quadratic_form(md::spd_inverse(steady), rho.mean) +
        0.5 * md::varsigma(md::SymMatrix(delta));
    EXPECT_NEAR(md::kl_divergence(rho, target), split, 1e-10);
  }
}

TEST(Wasserstein2, OneDimensionalClosedForm) {
  const double mu = -0.8, var = 3.0, steady = 1.5;
  const md::GaussianMeasure rho({mu}, md::SpdMatrix{md::Matrix{{var}}});
  const md::Wasserstein2Parts parts =
      md::wasserstein2_parts(rho, md::SpdMatrix{md::Matrix{{steady}}});
  const double ratio = var / steady;
  const double cov_expected = ratio + 1.0 - 2.0 * std::sqrt(ratio);
  EXPECT_NEAR(parts.covariance_part, cov_expected, 1e-13);
  EXPECT_NEAR(parts.total, mu * mu / steady + cov_expected, 1e-13);
}

TEST(Wasserstein2, PartsAreConsistentAndNonnegative) {
  md::Rng rng(53);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.index(4);
    const md::SpdMatrix steady = md::random_spd(rng, n, 0.2, 5.0);
    const md::GaussianMeasure rho = md::random_measure(rng, n, -4.0, 4.0, 0.05, 15.0);
    const md::Wasserstein2Parts parts = md::wasserstein2_parts(rho, steady);
    EXPECT_GE(parts.covariance_part, -1e-12);
    EXPECT_GE(parts.total, parts.covariance_part - 1e-12);
    const double mean_part = quadratic_form(md::spd_inverse(steady), rho.mean);
    EXPECT_NEAR(parts.total - parts.covariance_part, mean_part, 1e-10);
  }
  const md::SpdMatrix eye = md::SpdMatrix::identity(2);
  const md::Wasserstein2Parts at_target =
      md::wasserstein2_parts(md::GaussianMeasure({0.0, 0.0}, eye), eye);
  EXPECT_NEAR(at_target.total, 0.0, 1e-13);
  EXPECT_THROW(md::wasserstein2_parts(md::GaussianMeasure({0.0}, md::SpdMatrix::identity(1)),
                                      eye),
               md::InputError);
}

TEST(Dissimilarity, DelegatesAndRecentersTransport) {
  md::Rng rng(59);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.index(3);
    const md::GaussianMeasure rho = md::random_measure(rng, n, -4.0, 4.0, 0.1, 10.0);
    const md::GaussianMeasure target = md::random_measure(rng, n, -4.0, 4.0, 0.1, 10.0);
    EXPECT_GE(md::dissimilarity(md::DissimilarityKind::kl, rho, target), -1e-12);
    EXPECT_GE(md::dissimilarity(md::DissimilarityKind::wasserstein2, rho, target), -1e-12);
    EXPECT_NEAR(md::dissimilarity(md::DissimilarityKind::wasserstein2, rho, rho), 0.0, 1e-11);
  }
  // with equal means the transport branch matches the raw parts total
  const md::GaussianMeasure rho({0.7, -0.2}, md::SpdMatrix{md::Matrix{{2.0, 0.3}, {0.3, 1.0}}});
  const md::GaussianMeasure target({0.7, -0.2}, md::SpdMatrix::identity(2));
  const md::GaussianMeasure centered({0.0, 0.0}, rho.covariance);
  EXPECT_NEAR(md::dissimilarity(md::DissimilarityKind::wasserstein2, rho, target),
              md::wasserstein2_parts(centered, target.covariance).total, 1e-13);
}
