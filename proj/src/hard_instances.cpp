#include "rcdp/hard_instances.hpp"

#include <cmath>
#include <stdexcept>

#include "rcdp/adversary.hpp"
#include "rcdp/link.hpp"

namespace rcdp {

std::string_view to_string(HardKind k) { return k == HardKind::AdvDelayBall ? "hard_ball" : "hard_cube"; }

double HardInstance::preference(double margin) const {
  return link == LinkKind::Logistic ? logistic(margin) : piecewise_linear_link(margin, link_kappa);
}

std::vector<Vector> HardInstance::action_set(CounterRng& rng, int num_random) const {
  std::vector<Vector> acts;
  acts.reserve(num_random + 1);
  for (int i = 0; i < num_random; ++i) {
    Vector a(d);
    if (kind == HardKind::AdvDelayBall) {
      for (int j = 0; j < d; ++j) a(j) = rng.normal();
      a /= a.norm();
    } else {
      for (int j = 0; j < d; ++j) a(j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    }
    acts.push_back(std::move(a));
  }
  const auto pos = static_cast<std::ptrdiff_t>(rng() % static_cast<std::uint64_t>(num_random + 1));
  acts.insert(acts.begin() + pos, best_action);
  return acts;
}

HardInstance build_instance(HardKind kind, int d, CounterRng& rng, LinkKind link, double link_kappa) {
  if (d < 1) throw std::invalid_argument("build_instance: d must be >= 1");
  HardInstance inst;
  inst.kind = kind;
  inst.d = d;
  inst.link = link;
  inst.link_kappa = link_kappa;
  inst.delta_gap = kind == HardKind::AdvDelayBall ? 0.125 : 0.25;
  inst.theta_star.resize(d);
  Vector sign(d);
  for (int i = 0; i < d; ++i) {
    sign(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    inst.theta_star(i) = sign(i) * inst.delta_gap;
  }
  if (kind == HardKind::AdvDelayBall) {
    inst.best_action = sign / std::sqrt(double(d));
    inst.best_utility = std::sqrt(double(d)) * inst.delta_gap;
  } else {
    inst.best_action = sign;
    inst.best_utility = d * inst.delta_gap;
  }
  return inst;
}

BlindPhaseResult blind_phase_regret(const BlindSelector& select, const HardInstance& inst, long budget,
                                    CounterRng& rng) {
  if (budget < 0) throw std::invalid_argument("blind_phase_regret: negative budget");
  BlindPhaseResult res;
  DelayPolicy delays = inst.kind == HardKind::AdvDelayBall ? DelayPolicy::strategic(budget) : DelayPolicy::none();
  res.blind_rounds = inst.kind == HardKind::AdvDelayBall ? delays.blind_length() : budget;
  FeedbackQueue queue;
  for (int t = 1; t <= res.blind_rounds; ++t) {
    const auto actions = inst.action_set(rng);
    const auto [a, b] = select(t, actions);
    const double ua = inst.utility(actions.at(a));
    const double ub = inst.utility(actions.at(b));
    res.regret += 2.0 * inst.best_utility - ua - ub;
    const int outcome = rng.uniform() < inst.preference(ua - ub) ? 1 : 0;
    const long tau = inst.kind == HardKind::AdvDelayBall ? delays.assign_delay(t) : budget;
    queue.push(t, tau, outcome);
    if (!queue.tick(t).empty() && res.first_arrival == 0) res.first_arrival = t;
  }
  if (res.first_arrival == 0) {
    // Drain to find when the blind phase actually ends.
    for (long t = res.blind_rounds + 1; queue.pending() > 0; ++t) {
      if (!queue.tick(static_cast<int>(t)).empty()) {
        res.first_arrival = t;
        break;
      }
    }
  }
  return res;
}

BlindSelector uniform_selector(CounterRng& rng) {
  return [&rng](int, const std::vector<Vector>& actions) {
    const auto n = static_cast<std::uint64_t>(actions.size());
    return std::pair<int, int>{static_cast<int>(rng() % n), static_cast<int>(rng() % n)};
  };
}

std::pair<int, int> PolicySelector::operator()(int t, const std::vector<Vector>& actions) {
  DuelChoice c = policy_.select(t, actions);
  policy_.estimator().register_duel(t, c.dz_hat);
  policy_.estimator().solve_mle();
  return {c.a, c.b};
}

}  // namespace rcdp
