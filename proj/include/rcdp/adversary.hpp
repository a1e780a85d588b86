#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rcdp/rng.hpp"

namespace rcdp {

class BudgetViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CorruptionStrategy { FlipFirst, FlipInformative };

std::string_view to_string(CorruptionStrategy s);
CorruptionStrategy parse_corruption_strategy(std::string_view s);

// Outcome-flipping adversary with a hard budget on the number of flips.
class CorruptionPolicy {
 public:
  CorruptionPolicy(long budget, CorruptionStrategy strategy);

  // Returns the (possibly flipped) outcome. `margin` is <theta_*, dz_t>.
  int corrupt(int t, int outcome, double margin);

  long budget() const { return budget_; }
  long spent() const { return spent_; }
  CorruptionStrategy strategy() const { return strategy_; }

 private:
  double running_median(double value);

  long budget_;
  CorruptionStrategy strategy_;
  long spent_ = 0;
  // Two-heap running median of |margin|.
  std::priority_queue<double> low_;
  std::priority_queue<double, std::vector<double>, std::greater<double>> high_;
};

enum class DelayRegime { None, Stochastic, Strategic };

std::string_view to_string(DelayRegime r);
DelayRegime parse_delay_regime(std::string_view s);

// Largest M with M(M+1)/2 <= budget: the blind-phase length of the starvation attack.
long starvation_length(long budget);

class DelayPolicy {
 public:
  static DelayPolicy none();
  static DelayPolicy stochastic(double mean, double stddev, std::uint64_t seed);
  static DelayPolicy strategic(long budget);

  // Delay for round t (t >= 1). Strategic: M - t + 1 for t <= M, else 0.
  long assign_delay(int t);

  DelayRegime regime() const { return regime_; }
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }
  long budget() const { return budget_; }
  long blind_length() const { return blind_; }
  long spent() const { return spent_; }

 private:
  DelayRegime regime_ = DelayRegime::None;
  double mean_ = 0.0;
  double stddev_ = 0.0;
  std::uint64_t seed_ = 0;
  long budget_ = 0;
  long blind_ = 0;
  long spent_ = 0;
};

struct Arrival {
  int round;
  int outcome;
};

// Pending outcomes keyed by arrival round. tick(t) releases every entry with
// arrival round <= t in ascending order of the originating round.
class FeedbackQueue {
 public:
  void push(int round, long delay, int outcome);
  std::vector<Arrival> tick(int t);

  // |{s < t : s + tau_s > t}| for the current queue state at round t.
  int invisible(int t) const;
  std::size_t pending() const { return pending_.size(); }
  std::size_t delivered() const { return delivered_; }

 private:
  struct Entry {
    long arrival;
    int round;
    int outcome;
    bool operator<(const Entry& o) const {
      return arrival != o.arrival ? arrival < o.arrival : round < o.round;
    }
  };
  std::set<Entry> pending_;
  int last_tick_ = 0;
  std::size_t delivered_ = 0;
};

}  // namespace rcdp
