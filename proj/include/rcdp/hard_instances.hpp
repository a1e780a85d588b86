#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "rcdp/linalg.hpp"
#include "rcdp/policies.hpp"
#include "rcdp/rng.hpp"

namespace rcdp {

// Lower-bound constructions with a blind phase.
//   AdvDelayBall:   theta_* in {-1/8, +1/8}^d, actions in the unit L2 ball,
//                   a* = sign(theta_*)/sqrt(d), u* = sqrt(d)/8.
//   StochDelayCube: theta_* in {-1/4, +1/4}^d, actions in {-1, 1}^d,
//                   a* = sign(theta_*), u* = d/4.
enum class HardKind { AdvDelayBall, StochDelayCube };

std::string_view to_string(HardKind k);

enum class LinkKind { Logistic, PiecewiseLinear };

struct HardInstance {
  HardKind kind = HardKind::AdvDelayBall;
  int d = 1;
  double delta_gap = 0.125;
  Vector theta_star;
  Vector best_action;
  double best_utility = 0.0;
  LinkKind link = LinkKind::PiecewiseLinear;
  double link_kappa = 1.0;

  double utility(const Vector& a) const { return theta_star.dot(a); }
  double preference(double margin) const;

  // Finite action set for one round: `num_random` fresh random actions of the
  // instance's geometry, with a* inserted at a random position.
  std::vector<Vector> action_set(CounterRng& rng, int num_random = 64) const;
};

HardInstance build_instance(HardKind kind, int d, CounterRng& rng, LinkKind link = LinkKind::PiecewiseLinear,
                            double link_kappa = 1.0);

// Chooses a duel (indices into the action set) for round t.
using BlindSelector = std::function<std::pair<int, int>(int t, const std::vector<Vector>& actions)>;

struct BlindPhaseResult {
  double regret = 0.0;     // sum over blind rounds of 2u* - u(a_t) - u(b_t)
  long blind_rounds = 0;   // M (ball) or mu_tau (cube)
  long first_arrival = 0;  // earliest round at which any outcome arrived
};

// Runs the blind phase: delays follow the starvation schedule for budget
// `budget` (ball) or the fixed delay `budget` (cube). Outcomes are queued but
// none can arrive before the phase ends.
BlindPhaseResult blind_phase_regret(const BlindSelector& select, const HardInstance& inst, long budget,
                                    CounterRng& rng);

// Selector that plays uniformly random actions.
BlindSelector uniform_selector(CounterRng& rng);

// Selector backed by a DuelingPolicy over the raw actions. Each played duel is
// registered with the estimator, so phantom updates happen as in the main loop.
class PolicySelector {
 public:
  explicit PolicySelector(const PolicyParams& params) : policy_(params) {}
  std::pair<int, int> operator()(int t, const std::vector<Vector>& actions);
  DuelingPolicy& policy() { return policy_; }

 private:
  DuelingPolicy policy_;
};

}  // namespace rcdp
