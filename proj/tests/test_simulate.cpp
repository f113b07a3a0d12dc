#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "parisian/parisian.hpp"
#include "parisian/reference.hpp"
#include "parisian/simulate.hpp"

using namespace parisian;

namespace {

// Yields raw words that an exponential(lambda) distribution maps to the given waits.
struct ScriptedWaits {
  using result_type = std::uint64_t;
  std::vector<double> waits;
  double lambda = 1.0;
  std::size_t next = 0;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    const double u = 1.0 - std::exp(-lambda * waits.at(next++));
    return static_cast<result_type>(std::ldexp(u, 64));
  }
};

struct ScriptedClaims {
  std::vector<double> sizes;
  std::size_t next = 0;
  template <class R>
  double operator()(R&) {
    return sizes.at(next++);
  }
};

ModelParams table1(double u = 0.0, double d = 2.0) { return {u, 2.0, 1.0, ClaimDistribution::exponential(1.0), d}; }

}  // namespace

TEST(SimulatePath, NoClaimsBeforeHorizon) {
  ScriptedWaits rng{{5.0}};
  ScriptedClaims claims{{}};
  const ModelParams p(1.0, 1.0, 1.0, ClaimDistribution::exponential(2.0), 2.0);
  const auto o = simulate_path(p, 3.0, rng, claims);
  EXPECT_FALSE(o.parisian_ruin);
  EXPECT_FALSE(o.classical_ruin);
  EXPECT_TRUE(o.censored);
}

TEST(SimulatePath, SingleLargeClaim) {
  ScriptedWaits rng{{0.5, 5.0}};
  ScriptedClaims claims{{10.0}};
  const ModelParams p(1.0, 1.0, 1.0, ClaimDistribution::exponential(2.0), 2.0);
  const auto o = simulate_path(p, 100.0, rng, claims);
  ASSERT_TRUE(o.parisian_ruin);
  EXPECT_NEAR(o.tau_d, 2.5, 1e-9);
  EXPECT_EQ(o.claims_at_ruin, 1);
  EXPECT_NEAR(o.deficit_at_ruin, 6.5, 1e-9);
  EXPECT_NEAR(o.tau, 0.5, 1e-9);
  EXPECT_NEAR(o.classical_deficit, 8.5, 1e-9);
}

TEST(SimulatePath, ClockResetsAtUpCrossing) {
  // -1 at 0.5, back to 0 at 1.5, then -4.5 at 2.0 for good.
  ScriptedWaits rng{{0.5, 1.5, 10.0}};
  ScriptedClaims claims{{2.5, 5.0}};
  const ModelParams p(1.0, 1.0, 1.0, ClaimDistribution::exponential(2.0), 2.0);
  const auto o = simulate_path(p, 100.0, rng, claims);
  ASSERT_TRUE(o.parisian_ruin);
  EXPECT_NEAR(o.tau_d, 4.0, 1e-9);
  EXPECT_EQ(o.claims_at_ruin, 2);
  EXPECT_NEAR(o.deficit_at_ruin, 2.5, 1e-9);
  EXPECT_EQ(o.claims_at_classical, 1);
}

TEST(SimulatePath, ClockKeepsRunningAcrossClaims) {
  // below zero from 0.5; a second claim at 1.0 does not restart the clock
  ScriptedWaits rng{{0.5, 0.5, 10.0}};
  ScriptedClaims claims{{3.0, 1.0}};
  const ModelParams p(1.0, 1.0, 1.0, ClaimDistribution::exponential(2.0), 2.0);
  const auto o = simulate_path(p, 100.0, rng, claims);
  ASSERT_TRUE(o.parisian_ruin);
  EXPECT_NEAR(o.tau_d, 2.5, 1e-9);
  EXPECT_EQ(o.claims_at_ruin, 2);
}

TEST(SimulatePath, ZeroDelayIsClassicalRuin) {
  const auto p = table1(1.0, 0.0);
  ClaimSampler claims(p.claims());
  for (std::uint64_t i = 0; i < 5000; ++i) {
    auto rng = path_rng(7, i);
    claims.reset();
    const auto o = simulate_path(p, 40.0, rng, claims);
    ASSERT_EQ(o.parisian_ruin, o.classical_ruin);
    if (o.parisian_ruin) {
      EXPECT_EQ(o.tau_d, o.tau);
      EXPECT_EQ(o.claims_at_ruin, o.claims_at_classical);
      EXPECT_EQ(o.deficit_at_ruin, o.classical_deficit);
    }
  }
}

TEST(SimulatePath, RuinTimeAtLeastDelay) {
  const auto p = table1(0.0);
  for (std::uint64_t i = 0; i < 5000; ++i) {
    auto rng = path_rng(11, i);
    const auto o = simulate_path(p, 40.0, rng);
    if (o.parisian_ruin) {
      EXPECT_GE(o.tau_d, 2.0);
      EXPECT_GE(o.tau_d, o.tau + 2.0 - 1e-12);
      EXPECT_GE(o.deficit_at_ruin, 0.0);
    }
  }
}

TEST(EstimateJoint, DeterministicAcrossWorkers) {
  SimConfig cfg;
  cfg.paths = 30000;
  cfg.seed = 99;
  cfg.stream_count = 1;
  const auto a = estimate_joint(table1(), cfg, 5, {2.0, 3.0, 5.0}, {0.0, 1.0, 3.0});
  cfg.stream_count = 3;
  const auto b = estimate_joint(table1(), cfg, 5, {2.0, 3.0, 5.0}, {0.0, 1.0, 3.0});
  EXPECT_EQ(a.ruin.hits, b.ruin.hits);
  for (int n = 0; n < 5; ++n) {
    EXPECT_EQ(a.p[n].hits, b.p[n].hits);
    for (int t = 0; t < 2; ++t) {
      EXPECT_EQ(a.psi[n][t].hits, b.psi[n][t].hits);
      for (int x = 0; x < 2; ++x) EXPECT_EQ(a.deficit[n][t][x].hits, b.deficit[n][t][x].hits);
    }
  }
  cfg.seed = 100;
  const auto c = estimate_joint(table1(), cfg, 5);
  EXPECT_NE(a.ruin.hits, c.ruin.hits);
}

TEST(EstimateJoint, PartitionOfRuinEvent) {
  SimConfig cfg;
  cfg.paths = 20000;
  cfg.horizon = 30.0;
  const auto est = estimate_joint(table1(), cfg, 500);
  std::uint64_t total = 0;
  for (const auto& e : est.p) total += e.hits;
  EXPECT_EQ(total, est.ruin.hits);
  EXPECT_EQ(est.ruin.hits + est.censored.hits, cfg.paths);
  EXPECT_GE(est.ruin.std_error, 0.0);
}

TEST(EstimateJoint, OneClaimProbability) {
  SimConfig cfg;
  cfg.paths = 300000;
  const auto est = estimate_joint(table1(), cfg, 1);
  EXPECT_NEAR(est.p[0].value, std::exp(-6.0) / 3.0, 3.0 * est.p[0].std_error);
}

TEST(EstimateJoint, ZeroDelayMatchesClassicalRuin) {
  SimConfig cfg;
  cfg.paths = 100000;
  cfg.horizon = 200.0;
  const auto p = table1(1.0, 0.0);
  const auto est = estimate_joint(p, cfg, 1);
  EXPECT_EQ(est.ruin.hits, est.classical_ruin.hits);
  EXPECT_NEAR(est.ruin.value, reference::classical_ruin(p), 3.0 * est.ruin.std_error);
}

TEST(EstimateJoint, TabulatedClaimsAgreeWithAnalytic) {
  auto law = ClaimDistribution::sampled([](double x) { return 4.0 * x * std::exp(-2.0 * x); }, 0.01, 1e-12, {8, 0.0});
  const ModelParams p(0.5, 2.0, 1.0, law, 1.0);
  SolverConfig scfg;
  scfg.n_max = 3;
  const auto probs = ParisianSolver(p, scfg).probabilities();
  SimConfig cfg;
  cfg.paths = 200000;
  const auto est = estimate_joint(p, cfg, 3);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR(est.p[n].value, probs.pu[n], 3.0 * est.p[n].std_error + 1e-5) << n + 1;
}

TEST(EstimateJoint, RawRecords) {
  SimConfig cfg;
  cfg.paths = 5000;
  cfg.keep_raw = true;
  const auto est = estimate_joint(table1(), cfg, 3);
  EXPECT_EQ(est.raw.size(), est.ruin.hits);
  for (const auto& r : est.raw) EXPECT_GE(r.tau_d, 2.0);
}

TEST(EstimateJoint, InvalidConfig) {
  SimConfig cfg;
  cfg.paths = 0;
  EXPECT_THROW(estimate_joint(table1(), cfg, 3), ConfigError);
  cfg.paths = 10;
  cfg.horizon = 1.0;
  EXPECT_THROW(estimate_joint(table1(), cfg, 3), ConfigError);
  cfg.horizon = 0.0;
  EXPECT_THROW(estimate_joint(table1(), cfg, 0), ConfigError);
  EXPECT_THROW(estimate_joint(table1(), cfg, 2, {3.0, 2.0}), ConfigError);
}
