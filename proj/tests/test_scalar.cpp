#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mdp_dissip/gaussian.hpp"
#include "mdp_dissip/lyapunov.hpp"
#include "mdp_dissip/sampling.hpp"
#include "mdp_dissip/scalar_certificates.hpp"

namespace md = mdp_dissip;

TEST(Varsigma, ClosedFormAndDomain) {
  EXPECT_DOUBLE_EQ(md::varsigma(md::SymMatrix(md::Matrix(3, 3))), 0.0);
  // diagonal: sum over lam - log(1 + lam)
  const md::SymMatrix d{md::Matrix{{0.5, 0.0}, {0.0, -0.25}}};
  const double expected = (0.5 - std::log1p(0.5)) + (-0.25 - std::log1p(-0.25));
  EXPECT_NEAR(md::varsigma(d), expected, 1e-14);
  EXPECT_GT(md::varsigma(d), 0.0);
  EXPECT_THROW(md::varsigma(md::SymMatrix(md::Matrix{{-1.0}})), md::DomainError);
  EXPECT_THROW(md::varsigma(md::SymMatrix(md::Matrix{{-1.5}})), md::DomainError);
}

TEST(Vartheta, ZeroAtOriginAndBoundaries) {
  for (double a : {0.05, 0.3, 0.7, 0.95}) {
    EXPECT_NEAR(md::vartheta(a, 1.0 - a, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(md::vartheta(a, (1.0 - a) / 2.0, 0.0), 0.0, 1e-15);
  }
  // b = 1 - a is admissible, b just above is not
  EXPECT_NO_THROW(md::vartheta(0.4, 0.6, 1.0));
  EXPECT_THROW(md::vartheta(0.4, 0.6 + 1e-12, 1.0), md::DomainError);
  EXPECT_THROW(md::vartheta(0.4, 0.0, 1.0), md::DomainError);
  EXPECT_THROW(md::vartheta(1.0, 0.1, 1.0), md::DomainError);
  EXPECT_THROW(md::vartheta(0.4, 0.3, -1.0), md::DomainError);
  // a x must stay above -1 for the logarithm
  EXPECT_THROW(md::vartheta(-3.0, 0.5, 1.0), md::DomainError);
}

TEST(Vartheta, NonnegativeOnGrid) {
  double min_val = 1.0;
  for (int ia = 0; ia <= 20; ++ia) {
    const double a = 0.02 + 0.96 * ia / 20.0;
    for (int ib = 1; ib <= 10; ++ib) {
      const double b = std::min((1.0 - a) * ib / 10.0, 1.0 - a);
      for (int ix = 0; ix <= 40; ++ix) {
        const double x = -0.995 + (30.0 + 0.995) * ix / 40.0;
        min_val = std::min(min_val, md::vartheta(a, b, x));
      }
    }
  }
  EXPECT_GE(min_val, -1e-12);
}

TEST(GW2, ZeroAtOriginDomainAndGrid) {
  for (double alpha : {0.05, 0.5, 0.9}) {
    EXPECT_NEAR(md::g_w2(alpha, 0.0, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(md::g_w2(alpha, 1.0 - std::sqrt(alpha), 0.0), 0.0, 1e-15);
  }
  EXPECT_THROW(md::g_w2(0.0, 0.1, 1.0), md::DomainError);
  EXPECT_THROW(md::g_w2(1.0, 0.1, 1.0), md::DomainError);
  EXPECT_THROW(md::g_w2(0.25, 0.5 + 1e-12, 1.0), md::DomainError);
  EXPECT_THROW(md::g_w2(0.25, -0.1, 1.0), md::DomainError);
  EXPECT_THROW(md::g_w2(0.25, 0.1, -1.0), md::DomainError);

  double min_val = 1.0;
  for (int ia = 0; ia <= 20; ++ia) {
    const double alpha = 0.02 + 0.96 * ia / 20.0;
    for (int ib = 0; ib <= 10; ++ib) {
      const double beta = std::min((1.0 - std::sqrt(alpha)) * ib / 10.0,
                                   1.0 - std::sqrt(alpha));
      for (int ix = 0; ix <= 40; ++ix) {
        const double x = -0.995 + (30.0 + 0.995) * ix / 40.0;
        min_val = std::min(min_val, md::g_w2(alpha, beta, x));
      }
    }
  }
  EXPECT_GE(min_val, -1e-12);
}

TEST(EigenContraction, ScalarClosedLoop) {
  // scalar loop m: gap ratio is exactly m^2, within the stated m bound
  const double m = 0.6;
  const md::SpdMatrix steady{md::Matrix{{1.0}}};
  const md::SpdMatrix sigma{md::Matrix{{3.0}}};
  const md::SpdMatrix next{md::Matrix{{m * m * 3.0 + (1.0 - m * m)}}};
  const md::ContractionReport rep = md::eigen_contraction_check(sigma, next, steady, m);
  ASSERT_EQ(rep.ratios.size(), 1u);
  EXPECT_NEAR(rep.ratios[0], m * m, 1e-12);
  EXPECT_NEAR(rep.max_ratio, m * m, 1e-12);
  EXPECT_TRUE(rep.sign_preserved);
  EXPECT_TRUE(rep.bounded);
  EXPECT_TRUE(rep.pass());
  EXPECT_TRUE(rep.skipped.empty());
  EXPECT_FALSE(rep.at_fixed_point);
}

TEST(EigenContraction, FixedPointAndSkips) {
  const md::SpdMatrix steady{md::Matrix{{2.0, 0.5}, {0.5, 1.0}}};
  const md::ContractionReport rep =
      md::eigen_contraction_check(steady, steady, steady, 0.9);
  EXPECT_TRUE(rep.at_fixed_point);
  EXPECT_EQ(rep.skipped.size(), 2u);
  EXPECT_TRUE(rep.pass());
}

TEST(EigenContraction, FlagsNonContraction) {
  // a step that does not move the covariance cannot contract the gaps
  const md::SpdMatrix steady{md::Matrix{{1.0}}};
  const md::SpdMatrix sigma{md::Matrix{{3.0}}};
  const md::ContractionReport rep = md::eigen_contraction_check(sigma, sigma, steady, 0.6);
  EXPECT_FALSE(rep.bounded);
  EXPECT_FALSE(rep.pass());
  EXPECT_THROW(md::eigen_contraction_check(sigma, sigma, md::SpdMatrix::identity(2), 0.6),
               md::InputError);
}

TEST(GenericDecrease, AcceptsDecayRejectsGrowth) {
  const md::Matrix loop{{0.5, 0.1}, {0.0, 0.4}};
  const md::SpdMatrix noise{md::Matrix{{0.5, 0.1}, {0.1, 0.4}}};
  const md::SymMatrix steady_sym = md::solve_discrete_lyapunov(loop, noise.sym());
  const md::SpdMatrix steady{steady_sym.matrix()};

  std::vector<md::GaussianMeasure> traj;
  md::GaussianMeasure rho({3.0, -2.0}, md::SpdMatrix{md::Matrix{{6.0, 1.0}, {1.0, 4.0}}});
  for (int k = 0; k < 25; ++k) {
    traj.push_back(rho);
    rho = md::propagate(rho, loop, noise);
  }
  const auto zeta_kl = [](double l) { return l - 1.0 - std::log(l); };
  const auto zeta_w2 = [](double l) { return l + 1.0 - 2.0 * std::sqrt(l); };
  EXPECT_TRUE(md::generic_decrease_check(zeta_kl, traj, steady));
  EXPECT_TRUE(md::generic_decrease_check(zeta_w2, traj, steady));

  std::vector<md::GaussianMeasure> reversed(traj.rbegin(), traj.rend());
  EXPECT_FALSE(md::generic_decrease_check(zeta_kl, reversed, steady));
  EXPECT_THROW(md::generic_decrease_check(zeta_kl, {traj.front()}, steady), md::InputError);
}

TEST(EntropyStepCheck, HoldsOnRandomGapsAndValidatesInputs) {
  md::Rng rng(61);
  const md::Matrix m{{0.5, 0.2}, {-0.1, 0.4}};
  const double sigma_max = md::singular_values(m).front();
  ASSERT_LT(sigma_max, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    md::Matrix delta = md::random_spd(rng, 2, 0.05, 20.0).matrix();
    delta(0, 0) -= 1.0;
    delta(1, 1) -= 1.0;
    const double beta = rng.uniform(1e-6, 1.0 - sigma_max);
    double lhs = 0.0;
    EXPECT_NO_THROW(lhs = md::entropy_step_check(md::SymMatrix(delta), m, beta));
    EXPECT_GE(lhs, -1e-10);
  }
  EXPECT_THROW(md::entropy_step_check(md::SymMatrix::identity(2), md::Matrix::identity(2), 0.1),
               md::DomainError);
  EXPECT_THROW(md::entropy_step_check(md::SymMatrix::identity(2), m, 0.0), md::DomainError);
  EXPECT_THROW(md::entropy_step_check(md::SymMatrix::identity(2), m, 1.0 - sigma_max + 1e-9),
               md::DomainError);
  EXPECT_THROW(md::entropy_step_check(md::SymMatrix::identity(3), m, 0.1), md::InputError);
}
