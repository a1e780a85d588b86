#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rcdp/config.hpp"
#include "rcdp/trace.hpp"

namespace rcdp {

// Raised when a run breaks one of its invariants. Names the invariant and round.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, int round, const std::string& detail)
      : std::runtime_error("invariant '" + invariant + "' violated at round " + std::to_string(round) + ": " +
                           detail),
        invariant_(std::move(invariant)),
        round_(round) {}
  const std::string& invariant() const { return invariant_; }
  int round() const { return round_; }

 private:
  std::string invariant_;
  int round_;
};

// Optional per-round observer, e.g. for concentration diagnostics.
struct RoundObserver {
  virtual ~RoundObserver() = default;
  virtual void after_round(int t, const DuelingPolicy& policy, const Environment& env) = 0;
};

// One (policy, seed) run of the full loop:
//   predict zhat; select the pair; reveal post-serving contexts of the played
//   arms; draw the BTL outcome, corrupt it, assign its delay and enqueue it;
//   phantom-update V; absorb arrivals into W; fit the approximator; refit
//   theta; record regret against the noise-free features.
RunTrace run_single(const ExperimentConfig& cfg, PolicyType policy, std::uint64_t seed,
                    RoundObserver* observer = nullptr);

// All (policy, run) pairs with seed = seed0 + run, in parallel over
// cfg.threads workers. Traces come back ordered by policy then seed. When
// cfg.output_dir is set, writes one CSV per run, summary.csv and manifest.json.
std::vector<RunTrace> run_experiment(const ExperimentConfig& cfg);

// Writes traces, summary and manifest for an already-executed experiment.
void persist_experiment(const ExperimentConfig& cfg, const std::vector<RunTrace>& traces);

std::string git_describe();

}  // namespace rcdp
