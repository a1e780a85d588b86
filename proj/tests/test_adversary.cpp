#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "rcdp/adversary.hpp"

using namespace rcdp;

TEST(Corruption, ZeroBudgetPassesThrough) {
  CorruptionPolicy p(0, CorruptionStrategy::FlipFirst);
  for (int t = 1; t <= 50; ++t) EXPECT_EQ(p.corrupt(t, t % 2, 0.3), t % 2);
  EXPECT_EQ(p.spent(), 0);
}

TEST(Corruption, FlipFirstExhaustsBudget) {
  CorruptionPolicy p(2, CorruptionStrategy::FlipFirst);
  EXPECT_EQ(p.corrupt(1, 1, 0.0), 0);
  EXPECT_EQ(p.corrupt(2, 0, 0.0), 1);
  EXPECT_EQ(p.corrupt(3, 1, 0.0), 1);
  EXPECT_EQ(p.spent(), 2);
}

TEST(Corruption, FlipCountEqualsMinBudgetHorizon) {
  for (long budget : {0L, 5L, 25L, 400L}) {
    CorruptionPolicy p(budget, CorruptionStrategy::FlipFirst);
    const int T = 300;
    long flips = 0;
    for (int t = 1; t <= T; ++t) {
      const int l = (t * 7) % 3 == 0;
      flips += std::abs(p.corrupt(t, l, 0.1) - l);
    }
    EXPECT_EQ(flips, std::min<long>(budget, T));
  }
}

TEST(Corruption, FlipInformativeTargetsLargeMargins) {
  CorruptionPolicy p(100, CorruptionStrategy::FlipInformative);
  CounterRng rng(3, Stream::Outcome);
  long flips_small = 0, flips_large = 0;
  for (int t = 1; t <= 1000; ++t) {
    const double margin = rng.uniform();
    const int out = p.corrupt(t, 1, margin);
    (margin < 0.5 ? flips_small : flips_large) += (out == 0);
  }
  EXPECT_EQ(p.spent(), 100);
  EXPECT_GT(flips_large, 3 * flips_small);
}

TEST(Corruption, RejectsInvalid) {
  EXPECT_THROW(CorruptionPolicy(-1, CorruptionStrategy::FlipFirst), std::invalid_argument);
  CorruptionPolicy p(1, CorruptionStrategy::FlipFirst);
  EXPECT_THROW(p.corrupt(1, 2, 0.0), std::invalid_argument);
  EXPECT_EQ(parse_corruption_strategy("flip_informative"), CorruptionStrategy::FlipInformative);
}

TEST(Delay, StarvationLength) {
  EXPECT_EQ(starvation_length(10000), 140);
  EXPECT_EQ(140 * 141 / 2, 9870);
  EXPECT_EQ(starvation_length(0), 0);
  EXPECT_EQ(starvation_length(1), 1);
  EXPECT_EQ(starvation_length(2), 1);
  EXPECT_EQ(starvation_length(3), 2);
  // Brute-force integer search oracle.
  for (long budget = 0; budget <= 5000; budget += 37) {
    long m = 0;
    while ((m + 1) * (m + 2) / 2 <= budget) ++m;
    EXPECT_EQ(starvation_length(budget), m) << budget;
    EXPECT_EQ(starvation_length(budget),
              static_cast<long>(std::floor((-1.0 + std::sqrt(1.0 + 8.0 * budget)) / 2.0)));
  }
}

TEST(Delay, StrategicSchedule) {
  DelayPolicy p = DelayPolicy::strategic(10000);
  EXPECT_EQ(p.blind_length(), 140);
  EXPECT_EQ(p.assign_delay(1), 140);
  for (int t = 2; t < 140; ++t) p.assign_delay(t);
  EXPECT_EQ(p.assign_delay(140), 1);
  EXPECT_EQ(p.assign_delay(141), 0);
  EXPECT_EQ(p.spent(), 9870);
  EXPECT_LE(p.spent(), p.budget());

  DelayPolicy zero = DelayPolicy::strategic(0);
  for (int t = 1; t <= 10; ++t) EXPECT_EQ(zero.assign_delay(t), 0);
}

TEST(Delay, StochasticMoments) {
  // Pre-truncation normal: mean 100 +- 1 over 1e5 draws.
  double pre = 0.0;
  const int n = 100000;
  for (int t = 1; t <= n; ++t) {
    CounterRng rng(5, Stream::Delay, static_cast<std::uint64_t>(t));
    pre += rng.normal(100.0, 100.0);
  }
  EXPECT_NEAR(pre / n, 100.0, 1.0);

  DelayPolicy p = DelayPolicy::stochastic(100.0, 100.0, 5);
  double post = 0.0;
  for (int t = 1; t <= n; ++t) {
    const long tau = p.assign_delay(t);
    ASSERT_GE(tau, 0);
    post += double(tau);
  }
  EXPECT_GE(post / n, 100.0);
}

TEST(Delay, StochasticDeterministicPerRound) {
  DelayPolicy a = DelayPolicy::stochastic(50.0, 20.0, 9), b = DelayPolicy::stochastic(50.0, 20.0, 9);
  a.assign_delay(1);
  a.assign_delay(2);
  // b skips rounds; per-round keyed draws still line up.
  EXPECT_EQ(a.assign_delay(3), b.assign_delay(3));
}

TEST(Queue, Boundaries) {
  FeedbackQueue q;
  EXPECT_TRUE(q.tick(1).empty());
  q.push(3, 2, 1);
  EXPECT_TRUE(q.tick(4).empty());
  const auto out = q.tick(5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].round, 3);
  EXPECT_EQ(out[0].outcome, 1);
  EXPECT_THROW(q.tick(5), std::invalid_argument);
  EXPECT_THROW(q.push(6, -1, 0), std::invalid_argument);
}

TEST(Queue, ArrivalsSortedByRound) {
  FeedbackQueue q;
  q.push(1, 5, 0);
  q.push(2, 4, 1);
  q.push(3, 3, 0);
  for (int t = 1; t < 6; ++t) EXPECT_TRUE(q.tick(t).empty());
  const auto out = q.tick(6);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].round, 1);
  EXPECT_EQ(out[2].round, 3);
}

TEST(Queue, StarvationArrivesAtOnce) {
  DelayPolicy p = DelayPolicy::strategic(10000);
  FeedbackQueue q;
  const long M = p.blind_length();
  for (int t = 1; t <= 300; ++t) {
    q.push(t, p.assign_delay(t), 1);
    const auto out = q.tick(t);
    if (t <= M) {
      EXPECT_TRUE(out.empty()) << t;
    } else if (t == M + 1) {
      EXPECT_EQ(static_cast<long>(out.size()), M + 1);
    } else {
      EXPECT_EQ(out.size(), 1u);
    }
    EXPECT_LE(q.invisible(t), std::sqrt(2.0 * 10000));
  }
}

TEST(Queue, ConservationAndInvisibleCount) {
  DelayPolicy p = DelayPolicy::stochastic(30.0, 40.0, 3);
  FeedbackQueue q;
  std::map<int, int> seen;
  std::vector<long> delays;
  const int T = 500;
  int t = 1;
  for (; t <= T; ++t) {
    const long tau = p.assign_delay(t);
    delays.push_back(tau);
    q.push(t, tau, t % 2);
    for (const auto& a : q.tick(t)) ++seen[a.round];
    int brute = 0;
    for (int s = 1; s < t; ++s) brute += (s + delays[s - 1] > t);
    ASSERT_EQ(q.invisible(t), brute) << t;
  }
  for (; q.pending() > 0; ++t) {
    for (const auto& a : q.tick(t)) ++seen[a.round];
  }
  ASSERT_EQ(static_cast<int>(seen.size()), T);
  for (const auto& [round, count] : seen) EXPECT_EQ(count, 1) << round;
  EXPECT_EQ(q.delivered(), static_cast<std::size_t>(T));
}
