#include "rcdp/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcdp {

std::string_view to_string(CorruptionStrategy s) {
  return s == CorruptionStrategy::FlipFirst ? "flip_first" : "flip_informative";
}

CorruptionStrategy parse_corruption_strategy(std::string_view s) {
  if (s == "flip_first") return CorruptionStrategy::FlipFirst;
  if (s == "flip_informative") return CorruptionStrategy::FlipInformative;
  throw std::invalid_argument("unknown corruption strategy: " + std::string(s));
}

CorruptionPolicy::CorruptionPolicy(long budget, CorruptionStrategy strategy)
    : budget_(budget), strategy_(strategy) {
  if (budget < 0) throw std::invalid_argument("corruption budget must be >= 0");
}

double CorruptionPolicy::running_median(double value) {
  if (low_.empty() || value <= low_.top()) {
    low_.push(value);
  } else {
    high_.push(value);
  }
  if (low_.size() > high_.size() + 1) {
    high_.push(low_.top());
    low_.pop();
  } else if (high_.size() > low_.size()) {
    low_.push(high_.top());
    high_.pop();
  }
  if (low_.size() == high_.size()) return 0.5 * (low_.top() + high_.top());
  return low_.top();
}

int CorruptionPolicy::corrupt(int /*t*/, int outcome, double margin) {
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("corrupt: outcome must be 0 or 1");
  bool flip = spent_ < budget_;
  if (strategy_ == CorruptionStrategy::FlipInformative) {
    const double a = std::abs(margin);
    const double med = running_median(a);
    flip = flip && a >= med;
  }
  if (!flip) return outcome;
  ++spent_;
  if (spent_ > budget_) throw BudgetViolation("corruption budget exceeded");
  return 1 - outcome;
}

std::string_view to_string(DelayRegime r) {
  switch (r) {
    case DelayRegime::None: return "none";
    case DelayRegime::Stochastic: return "stochastic";
    case DelayRegime::Strategic: return "strategic";
  }
  return "?";
}

DelayRegime parse_delay_regime(std::string_view s) {
  if (s == "none") return DelayRegime::None;
  if (s == "stochastic") return DelayRegime::Stochastic;
  if (s == "strategic" || s == "adversarial") return DelayRegime::Strategic;
  throw std::invalid_argument("unknown delay regime: " + std::string(s));
}

long starvation_length(long budget) {
  if (budget <= 0) return 0;
  long m = static_cast<long>(std::floor((-1.0 + std::sqrt(1.0 + 8.0 * double(budget))) / 2.0));
  // Correct for rounding in the closed form.
  while (m * (m + 1) / 2 > budget) --m;
  while ((m + 1) * (m + 2) / 2 <= budget) ++m;
  return m;
}

DelayPolicy DelayPolicy::none() { return DelayPolicy{}; }

DelayPolicy DelayPolicy::stochastic(double mean, double stddev, std::uint64_t seed) {
  if (!(stddev >= 0.0)) throw std::invalid_argument("delay stddev must be >= 0");
  DelayPolicy p;
  p.regime_ = DelayRegime::Stochastic;
  p.mean_ = mean;
  p.stddev_ = stddev;
  p.seed_ = seed;
  return p;
}

DelayPolicy DelayPolicy::strategic(long budget) {
  if (budget < 0) throw std::invalid_argument("delay budget must be >= 0");
  DelayPolicy p;
  p.regime_ = DelayRegime::Strategic;
  p.budget_ = budget;
  p.blind_ = starvation_length(budget);
  return p;
}

long DelayPolicy::assign_delay(int t) {
  if (t < 1) throw std::invalid_argument("assign_delay: round must be >= 1");
  long tau = 0;
  switch (regime_) {
    case DelayRegime::None:
      break;
    case DelayRegime::Stochastic: {
      CounterRng rng(seed_, Stream::Delay, static_cast<std::uint64_t>(t));
      tau = std::lround(std::max(0.0, rng.normal(mean_, stddev_)));
      break;
    }
    case DelayRegime::Strategic:
      tau = t <= blind_ ? blind_ - t + 1 : 0;
      break;
  }
  spent_ += tau;
  if (regime_ == DelayRegime::Strategic && spent_ > budget_) {
    throw BudgetViolation("strategic delay budget exceeded at round " + std::to_string(t));
  }
  return tau;
}

void FeedbackQueue::push(int round, long delay, int outcome) {
  if (delay < 0) throw std::invalid_argument("FeedbackQueue: negative delay");
  pending_.insert(Entry{round + delay, round, outcome});
}

std::vector<Arrival> FeedbackQueue::tick(int t) {
  if (t <= last_tick_) throw std::invalid_argument("FeedbackQueue::tick: rounds must increase");
  last_tick_ = t;
  std::vector<Arrival> out;
  auto it = pending_.begin();
  while (it != pending_.end() && it->arrival <= t) {
    out.push_back(Arrival{it->round, it->outcome});
    it = pending_.erase(it);
  }
  std::sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) { return a.round < b.round; });
  delivered_ += out.size();
  return out;
}

int FeedbackQueue::invisible(int t) const {
  int n = 0;
  for (const auto& e : pending_) {
    if (e.round < t && e.arrival > t) ++n;
  }
  return n;
}

}  // namespace rcdp
