#include <gtest/gtest.h>

#include <cmath>

#include "rcdp/hard_instances.hpp"

using namespace rcdp;

namespace {

double mean_blind_regret(HardKind kind, int d, long budget, int seeds, bool learner) {
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    CounterRng rng(1000 + s, Stream::Instance);
    const HardInstance inst = build_instance(kind, d, rng);
    if (learner) {
      PolicyParams p = theory_params({PolicyType::RcdpUcb, false, 1.0}, d, 0, 1.0, 0.2, 0.05, 1.0, 1.0);
      PolicySelector sel(p);
      total += blind_phase_regret(std::ref(sel), inst, budget, rng).regret;
    } else {
      CounterRng pick(2000 + s, Stream::Policy);
      total += blind_phase_regret(uniform_selector(pick), inst, budget, rng).regret;
    }
  }
  return total / seeds;
}

}  // namespace

TEST(HardInstance, BallOptimum) {
  CounterRng rng(1, Stream::Instance);
  const HardInstance inst = build_instance(HardKind::AdvDelayBall, 4, rng);
  EXPECT_DOUBLE_EQ(inst.delta_gap, 0.125);
  EXPECT_NEAR(inst.best_utility, 0.25, 1e-15);
  EXPECT_NEAR(inst.best_action.norm(), 1.0, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(inst.best_action(i)), 0.5, 1e-15);
  EXPECT_NEAR(inst.utility(inst.best_action), 0.25, 1e-15);
  // No unit vector beats a* (Cauchy-Schwarz, checked numerically).
  for (int i = 0; i < 2000; ++i) {
    Vector a(4);
    for (int j = 0; j < 4; ++j) a(j) = rng.normal();
    a /= a.norm();
    ASSERT_LE(inst.utility(a), inst.best_utility + 1e-12);
  }
}

TEST(HardInstance, CubeOptimum) {
  CounterRng rng(2, Stream::Instance);
  const HardInstance inst = build_instance(HardKind::StochDelayCube, 1, rng);
  EXPECT_DOUBLE_EQ(inst.best_utility, 0.25);
  EXPECT_DOUBLE_EQ(inst.utility(inst.best_action), 0.25);
  EXPECT_THROW(build_instance(HardKind::StochDelayCube, 0, rng), std::invalid_argument);
}

TEST(HardInstance, FixedActionHasZeroMeanUtilityOverPrior) {
  const int d = 5, n = 10000;
  Vector fixed(d);
  fixed << 0.3, -0.2, 0.5, 0.1, -0.4;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(i, Stream::Instance);
    const double u = build_instance(HardKind::AdvDelayBall, d, rng).utility(fixed);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_LT(std::abs(mean), 3.0 * sd / std::sqrt(double(n)));
}

TEST(HardInstance, ActionSetContainsOptimum) {
  CounterRng rng(3, Stream::Instance);
  const HardInstance inst = build_instance(HardKind::StochDelayCube, 6, rng);
  const auto acts = inst.action_set(rng);
  ASSERT_EQ(acts.size(), 65u);
  int hits = 0;
  for (const auto& a : acts) {
    hits += (a == inst.best_action);
    EXPECT_EQ(a.cwiseAbs(), Vector::Ones(6));
  }
  EXPECT_GE(hits, 1);
}

TEST(HardInstance, PiecewiseLinearLink) {
  CounterRng rng(4, Stream::Instance);
  const HardInstance inst = build_instance(HardKind::AdvDelayBall, 2, rng, LinkKind::PiecewiseLinear, 2.0);
  EXPECT_DOUBLE_EQ(inst.preference(0.1), 0.7);
  EXPECT_DOUBLE_EQ(inst.preference(-1.0), 0.0);
}

TEST(BlindPhase, ZeroBudgetIsZero) {
  CounterRng rng(5, Stream::Instance), pick(5, Stream::Policy);
  const HardInstance inst = build_instance(HardKind::AdvDelayBall, 3, rng);
  const auto r = blind_phase_regret(uniform_selector(pick), inst, 0, rng);
  EXPECT_EQ(r.blind_rounds, 0);
  EXPECT_DOUBLE_EQ(r.regret, 0.0);
  EXPECT_THROW(blind_phase_regret(uniform_selector(pick), inst, -1, rng), std::invalid_argument);
}

TEST(BlindPhase, BallBlindLengthAndFirstArrival) {
  CounterRng rng(6, Stream::Instance), pick(6, Stream::Policy);
  const HardInstance inst = build_instance(HardKind::AdvDelayBall, 4, rng);
  const auto r = blind_phase_regret(uniform_selector(pick), inst, 10000, rng);
  EXPECT_EQ(r.blind_rounds, 140);
  EXPECT_EQ(r.first_arrival, 141);
}

TEST(BlindPhase, UniformBallMatchesExpectation) {
  const double mean = mean_blind_regret(HardKind::AdvDelayBall, 4, 10000, 100, false);
  EXPECT_NEAR(mean, 2.0 * 0.25 * 140, 0.1 * 70.0);
}

TEST(BlindPhase, UniformCubeMatchesExpectation) {
  const double mean = mean_blind_regret(HardKind::StochDelayCube, 8, 50, 100, false);
  EXPECT_NEAR(mean, 2.0 * 8 * 0.25 * 50, 0.1 * 200.0);
}

TEST(BlindPhase, LearnerScalesWithSqrtBudget) {
  const double base = mean_blind_regret(HardKind::AdvDelayBall, 4, 10000, 100, true);
  const double doubled = mean_blind_regret(HardKind::AdvDelayBall, 4, 20000, 100, true);
  EXPECT_NEAR(base, 70.0, 7.0);
  const double ratio = doubled / base;
  EXPECT_GE(ratio, 1.25);
  EXPECT_LE(ratio, 1.6);
}
