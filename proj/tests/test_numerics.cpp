#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "parisian/numerics.hpp"

using namespace parisian;

TEST(Integrate, RightRectangleGeometricSum) {
  auto f = [](double t) { return std::exp(-2.2 * t); };
  EXPECT_NEAR(integrate(f, 2.0, 3.0, 0.1, Rule::right_rectangle), 0.0044364, 5e-8);
  double sum = 0.0;
  for (int i = 1; i <= 10; ++i) sum += 0.1 * std::exp(-2.2 * (2.0 + 0.1 * i));
  EXPECT_NEAR(integrate(f, 2.0, 3.0, 0.1, Rule::right_rectangle), sum, 1e-15);
}

TEST(Integrate, EmptyAndConstant) {
  auto f = [](double t) { return std::sin(t); };
  EXPECT_EQ(integrate(f, 1.0, 1.0, 0.1, Rule::trapezoid), 0.0);
  auto one = [](double) { return 1.0; };
  EXPECT_NEAR(integrate(one, 0.0, 1.0, 0.1, Rule::trapezoid), 1.0, 1e-14);
  EXPECT_NEAR(integrate(one, 0.0, 1.0, 0.1, Rule::right_rectangle), 1.0, 1e-14);
}

TEST(Integrate, TrapezoidExponential) {
  auto f = [](double t) { return std::exp(-t); };
  EXPECT_NEAR(integrate(f, 0.0, 10.0, 0.01, Rule::trapezoid), 1.0 - std::exp(-10.0), 1e-5);
}

TEST(Integrate, RuleOrders) {
  auto f = [](double t) { return std::exp(-t); };
  const double exact = 1.0 - std::exp(-2.0);
  const double r1 = std::abs(integrate(f, 0.0, 2.0, 0.1, Rule::right_rectangle) - exact);
  const double r2 = std::abs(integrate(f, 0.0, 2.0, 0.025, Rule::right_rectangle) - exact);
  const double t1 = std::abs(integrate(f, 0.0, 2.0, 0.1, Rule::trapezoid) - exact);
  const double t2 = std::abs(integrate(f, 0.0, 2.0, 0.025, Rule::trapezoid) - exact);
  EXPECT_NEAR(r1 / r2, 4.0, 0.3);
  EXPECT_NEAR(t1 / t2, 16.0, 0.5);
}

TEST(Integrate, RejectsOffGridRange) {
  auto f = [](double) { return 1.0; };
  EXPECT_THROW(integrate(f, 0.0, 1.05, 0.1, Rule::trapezoid), ConfigError);
  EXPECT_THROW(integrate(f, 1.0, 0.0, 0.1, Rule::trapezoid), ConfigError);
}

TEST(DensityGridTest, InterpolationAndIntegration) {
  const DensityGrid g(2.0, 0.5, {1.0, 3.0, 5.0}, Rule::trapezoid, 0.5);
  EXPECT_EQ(interp_linear(g, 2.5), 1.0);
  EXPECT_EQ(interp_linear(g, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(interp_linear(g, 3.25), 4.0);
  EXPECT_DOUBLE_EQ(interp_linear(g, 2.25), 0.75);
  EXPECT_EQ(interp_linear(g, 2.0), 0.0);
  EXPECT_EQ(interp_linear(g, 1.0), 0.0);
  EXPECT_EQ(interp_linear(g, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(integrate(g, 2.0, 3.5), 0.5 * (0.25 + 1.0 + 3.0 + 2.5));
  const DensityGrid r(2.0, 0.5, {1.0, 3.0, 5.0}, Rule::right_rectangle, 0.5);
  EXPECT_DOUBLE_EQ(integrate(r, 2.0, 3.5), 0.5 * 9.0);
  EXPECT_DOUBLE_EQ(integrate(r, 2.5, 3.0), 1.5);
}

TEST(DensityGridTest, RejectsNonFinite) {
  EXPECT_THROW(DensityGrid(0.0, 0.1, {1.0, NAN}), NumericalError);
  EXPECT_THROW(DensityGrid(0.0, 0.0, {1.0}), ConfigError);
}

TEST(CertifyTail, ExponentialAndGamma) {
  EXPECT_NEAR(certify_tail({1.0, 1.0, 0.0}, 20.0), std::exp(-20.0), 1e-22);
  EXPECT_NEAR(certify_tail({1.0, 2.2, 0.0}, 10.0), std::exp(-22.0) / 2.2, 1e-22);
  const double g = certify_tail({1.0, 1.0, 2.0}, 30.0);
  EXPECT_NEAR(g, std::exp(-30.0) * (900.0 + 60.0 + 2.0), 1e-20);
  EXPECT_LT(g, 1e-9);
  EXPECT_THROW(certify_tail({1.0, 0.0, 0.0}, 1.0), NumericalError);
}

TEST(CertifyTail, TruncationPoint) {
  const Envelope env{1.0, 1.0, 3.0};
  const double T = truncation_point(env, 1e-10);
  EXPECT_LE(certify_tail(env, T), 1e-10);
  EXPECT_GT(certify_tail(env, 0.999 * T), 1e-10);
}

TEST(Poisson, HorizonBoundsLowerTail) {
  const double T = poisson_horizon(1.0, 8, 1e-9);
  EXPECT_LT(poisson_cdf(T, 8), 1e-9);
  EXPECT_GT(poisson_cdf(0.99 * T, 8), 1e-9);
  EXPECT_NEAR(poisson_cdf(2.0, 3) + poisson_upper(2.0, 3), 1.0, 1e-15);
  EXPECT_NEAR(poisson_pmf(2.0, 3), 8.0 / 6.0 * std::exp(-2.0), 1e-15);
}

TEST(GaussLegendreTest, PolynomialExactness) {
  auto f = [](double x) { return std::pow(x, 31); };
  EXPECT_NEAR(Gauss16::integrate(f, 0.0, 1.0), 1.0 / 32.0, 1e-15);
  EXPECT_NEAR(Gauss16::integrate([](double x) { return std::exp(-x); }, 0.0, 5.0, 4), 1.0 - std::exp(-5.0), 1e-15);
}

TEST(Richardson, RemovesSecondOrderError) {
  auto f = [](double t) { return std::exp(-t); };
  std::vector<double> fine, coarse;
  double acc = 0.0;
  fine.push_back(0.0);
  for (int i = 1; i <= 40; ++i) {
    acc += 0.025 * (f(0.025 * (i - 1)) + f(0.025 * i));
    fine.push_back(acc);
  }
  acc = 0.0;
  coarse.push_back(0.0);
  for (int i = 1; i <= 20; ++i) {
    acc += 0.05 * (f(0.05 * (i - 1)) + f(0.05 * i));
    coarse.push_back(acc);
  }
  const auto r = richardson(fine, coarse);
  EXPECT_NEAR(r.back(), 2.0 * (1.0 - std::exp(-1.0)), 1e-8);
}
