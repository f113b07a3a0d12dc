#include <cmath>

#include <gtest/gtest.h>

#include "parisian/passage.hpp"

using namespace parisian;

namespace {

ModelParams base() { return {0.0, 2.0, 1.0, ClaimDistribution::exponential(1.0), 2.0}; }

}  // namespace

TEST(Passage, AtomValues) {
  const auto a = PassageLaw(base(), 2.0).atom();
  EXPECT_DOUBLE_EQ(a.location, 1.0);
  EXPECT_NEAR(a.mass, std::exp(-1.0), 1e-15);
  const auto z = PassageLaw(base(), 0.0).atom();
  EXPECT_EQ(z.location, 0.0);
  EXPECT_EQ(z.mass, 1.0);
  const auto law = v_density(base(), 2.0, 0);
  ASSERT_EQ(law.atoms().size(), 1u);
}

TEST(Passage, DensityExample) {
  EXPECT_NEAR(v_density(base(), 1.0, 1, 1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(v_density(base(), 1.0, 1).density(1.0), std::exp(-2.0), 1e-15);
}

TEST(Passage, SupportStartsAtCrossing) {
  const PassageLaw law(base(), 3.0);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(law.density(k, 1.4), 0.0);
    EXPECT_EQ(law.density(k, 1.5), 0.0);
    EXPECT_GT(law.density(k, 1.6), 0.0);
  }
}

TEST(Passage, Normalization) {
  for (double y : {0.5, 1.0, 2.0, 5.0}) EXPECT_NEAR(PassageLaw(base(), y).normalization(1e-9), 1.0, 1e-6) << y;
}

TEST(Passage, TransformIdentityGrid) {
  for (double y : {0.5, 1.0, 2.0})
    for (double delta : {0.0, 0.1, 0.5})
      for (double r : {0.3, 0.7, 1.0}) {
        const auto tr = transform_check(base(), y, delta, r, 1e-9);
        EXPECT_NEAR(tr.lhs, tr.rhs, 1e-6) << y << " " << delta << " " << r;
      }
}

TEST(Passage, TransformExamples) {
  const auto zero = transform_check(base(), 0.0, 0.3, 0.5);
  EXPECT_EQ(zero.lhs, 1.0);
  EXPECT_EQ(zero.rhs, 1.0);
  const auto tr = transform_check(base(), 1.0, 0.5, 1.0);
  EXPECT_NEAR(tr.rhs, std::exp(-(-0.5 + std::sqrt(4.25)) / 4.0), 1e-12);
  EXPECT_NEAR(tr.rhs, 0.6768, 1e-4);
  EXPECT_NEAR(tr.lhs, tr.rhs, 1e-6);
  const auto one = transform_check(base(), 3.0, 0.0, 1.0);
  EXPECT_EQ(one.rhs, 1.0);
}

TEST(Passage, TabulatedClaims) {
  auto law = ClaimDistribution::sampled([](double x) { return 2.0 * x * std::exp(-x * x); }, 0.01, 1e-12, {80, 0.0});
  const ModelParams p(0.0, 1.5, 1.0, law, 1.0);
  for (double y : {0.5, 2.0}) {
    const auto tr = transform_check(p, y, 0.2, 0.6, 1e-8);
    EXPECT_NEAR(tr.lhs, tr.rhs, 1e-4) << y;
  }
}

TEST(Passage, InvalidArguments) {
  EXPECT_THROW(PassageLaw(base(), -1.0), ConfigError);
  EXPECT_THROW(transform_check(base(), 1.0, -0.1, 1.0), ConfigError);
  EXPECT_THROW(transform_check(base(), 1.0, 0.1, 0.0), ConfigError);
  EXPECT_THROW(PassageLaw(base(), 1.0).density(-1, 1.0), ConfigError);
}
