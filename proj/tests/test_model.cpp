#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "parisian/model.hpp"
#include "parisian/numerics.hpp"

using namespace parisian;

namespace {

ClaimDistribution sampled_exponential(double step = 0.005) {
  return ClaimDistribution::sampled([](double x) { return std::exp(-x); }, step, 1e-12, {6, 0.0});
}

}  // namespace

TEST(ConvDensity, ErlangValues) {
  const auto ex = ClaimDistribution::exponential(1.0);
  EXPECT_NEAR(ex.conv_density(2, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(ex.conv_density(3, 2.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(ex.conv_density(3, 2.0), 0.2706706, 1e-7);
  EXPECT_EQ(ex.conv_density(2, -1.0), 0.0);
}

TEST(ConvDensity, ZeroFoldIsAtom) {
  const auto law = ClaimDistribution::exponential(1.0).conv_law(0);
  ASSERT_EQ(law.atoms().size(), 1u);
  EXPECT_EQ(law.atoms()[0].location, 0.0);
  EXPECT_EQ(law.atoms()[0].mass, 1.0);
  EXPECT_FALSE(law.has_density());
}

TEST(ConvTail, Values) {
  const auto ex = ClaimDistribution::exponential(1.0);
  EXPECT_EQ(ex.conv_tail(1, 0.0), 1.0);
  EXPECT_NEAR(ex.conv_tail(2, 1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(ex.conv_tail(0, 3.0), 0.0);
  EXPECT_EQ(ex.conv_tail(0, -1.0), 1.0);
}

TEST(ConvDensity, UnitMassAndTailConsistency) {
  for (const auto& law : {ClaimDistribution::exponential(1.5), sampled_exponential()}) {
    for (int k = 1; k <= 4; ++k) {
      const double mass = Gauss16::integrate([&](double x) { return law.conv_density(k, x); }, 0.0, 40.0, 40);
      EXPECT_NEAR(mass, 1.0, 1e-4) << "k=" << k;
      for (double x : {0.5, 1.0, 3.0}) {
        const double tail = Gauss16::integrate([&](double s) { return law.conv_density(k, s); }, x, 40.0, 40);
        EXPECT_NEAR(law.conv_tail(k, x), tail, 1e-4) << "k=" << k << " x=" << x;
      }
    }
  }
}

TEST(ConvDensity, ConvolutionRecursion) {
  const auto law = sampled_exponential(0.01);
  for (int k = 1; k <= 4; ++k)
    for (double x : {0.7, 2.0, 4.5}) {
      const double conv =
          Gauss16::integrate([&](double s) { return law.conv_density(k, s) * law.pdf(x - s); }, 0.0, x, 32);
      EXPECT_NEAR(law.conv_density(k + 1, x), conv, 2e-4) << "k=" << k << " x=" << x;
    }
}

TEST(ConvDensity, TabulatedMatchesExponential) {
  const auto ex = ClaimDistribution::exponential(1.0);
  const auto tab = sampled_exponential();
  EXPECT_NEAR(tab.mean(), 1.0, 1e-4);
  for (int k = 1; k <= 6; ++k)
    for (double x = 0.25; x < 12.0; x += 0.5) EXPECT_NEAR(tab.conv_density(k, x), ex.conv_density(k, x), 1e-4);
  EXPECT_THROW(tab.conv_density(7, 1.0), NumericalError);
}

TEST(ClaimCsv, LoadsAndPads) {
  std::istringstream in("x,f\n0.5,0.5\n1.0,0.5\n1.5,0.5\n2.0,0.5\n2.5,0.0\n");
  const auto law = ClaimDistribution::from_csv(in);
  EXPECT_DOUBLE_EQ(law.grid_step(), 0.5);
  EXPECT_EQ(law.pdf(0.0), 0.0);
  EXPECT_NEAR(law.pdf(1.0), 0.5, 1e-12);
  EXPECT_NEAR(law.mean(), 1.25, 1e-12);
}

TEST(ClaimCsv, RejectsBadInput) {
  std::istringstream uneven("0,1\n0.1,1\n0.3,1\n");
  EXPECT_THROW(ClaimDistribution::from_csv(uneven), ConfigError);
  std::istringstream junk("0,1\nabc\n");
  EXPECT_THROW(ClaimDistribution::from_csv(junk), ConfigError);
  std::istringstream mass("0,5\n1,5\n");
  EXPECT_THROW(ClaimDistribution::from_csv(mass), ConfigError);
  std::istringstream offset("0.25,1\n0.5,1\n");
  EXPECT_THROW(ClaimDistribution::from_csv(offset), ConfigError);
}

TEST(ModelParamsTest, Validation) {
  const auto ex = ClaimDistribution::exponential(1.0);
  EXPECT_NO_THROW(ModelParams(0.0, 2.0, 1.0, ex, 2.0));
  EXPECT_THROW(ModelParams(0.0, 1.0, 1.0, ex, 2.0), ConfigError);
  EXPECT_THROW(ModelParams(-1.0, 2.0, 1.0, ex, 2.0), ConfigError);
  EXPECT_THROW(ModelParams(0.0, 2.0, 0.0, ex, 2.0), ConfigError);
  EXPECT_THROW(ModelParams(0.0, 2.0, 1.0, ex, -1.0), ConfigError);
  EXPECT_THROW(ClaimDistribution::exponential(0.0), ConfigError);
}

TEST(Lundberg, Examples) {
  const auto ex = ClaimDistribution::exponential(1.0);
  EXPECT_NEAR(solve_lundberg(ex, 2.0, 1.0, 0.0, 1.0), 0.0, 1e-14);
  EXPECT_NEAR(solve_lundberg(ex, 2.0, 1.0, 0.5, 1.0), (-0.5 + std::sqrt(4.25)) / 4.0, 1e-12);
  // (1 - 2s)(1 + s) = 0.5  ->  2s^2 + s - 0.5 = 0
  EXPECT_NEAR(solve_lundberg(ex, 2.0, 1.0, 0.0, 0.5), (-1.0 + std::sqrt(5.0)) / 4.0, 1e-12);
}

TEST(Lundberg, ResidualGeneralClaims) {
  const auto tab = sampled_exponential(0.01);
  const auto ex = ClaimDistribution::exponential(1.0);
  for (double delta : {0.0, 0.2, 1.0})
    for (double r : {0.3, 0.8, 1.0}) {
      for (const auto* law : {&ex, &tab}) {
        const double rho = solve_lundberg(*law, 2.0, 1.0, delta, r);
        EXPECT_GE(rho, 0.0);
        EXPECT_LT(std::abs(1.0 + delta - 2.0 * rho - r * law->laplace(rho)), 1e-10);
      }
    }
}
