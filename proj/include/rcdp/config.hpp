#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcdp/adversary.hpp"
#include "rcdp/approximator.hpp"
#include "rcdp/environment.hpp"
#include "rcdp/estimator.hpp"
#include "rcdp/policies.hpp"

namespace rcdp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdversaryConfig {
  long corruption_budget = 25;
  CorruptionStrategy strategy = CorruptionStrategy::FlipFirst;
  // Corrupted outcomes are delivered in the round they are generated; only
  // clean outcomes are delayed.
  bool corrupted_immediate = true;
  DelayRegime regime = DelayRegime::Strategic;
  long delay_budget = 10000;
  double delay_mean = 100.0;
  double delay_std = 100.0;

  // D = max(sqrt(Lambda), mu_tau) restricted to the active regime, floored at 1.
  double delay_complexity() const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvConfig env;
  AdversaryConfig adversary;
  std::vector<PolicyType> policies = all_policies();
  bool rcdp_uses_postserving = true;
  bool baselines_use_postserving = true;
  int runs = 10;
  std::uint64_t seed0 = 0;
  std::string output_dir;
  std::optional<double> alpha_override;
  double c_mult = 1.0;
  std::map<PolicyType, double> c_mult_per_policy;
  double lambda = 1.0;
  double delta = 0.05;
  double M = 1.0;
  std::optional<double> kappa;
  MleMode mle = MleMode::StreamingStep;
  ApproximatorKind approximator;
  int threads = 1;
  // Period (in rounds) of the O(d^3) PSD-order and inverse-accuracy checks.
  int heavy_check_every = 250;

  void validate() const;
  double effective_kappa() const;
  double exploration_mult(PolicyType p) const;
  // `feature_scale` is the environment's context scale; the approximator undoes it.
  PolicyParams policy_params(PolicyType p, std::uint64_t seed, double feature_scale) const;

  // Canonical key-value echo (round-trips through parse_config).
  std::map<std::string, std::string> to_kv() const;
};

using KeyValues = std::map<std::string, std::string>;

// Parses "key = value" lines; '#' starts a comment. Duplicate keys are an error.
KeyValues parse_key_values(const std::string& text, const std::string& source = "<string>");
KeyValues read_key_values(const std::string& path);

ExperimentConfig config_from_kv(const KeyValues& kv);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Keys that accept comma-separated sweep lists.
const std::vector<std::string>& sweepable_keys();

struct SweepPoint {
  std::string label;  // e.g. "dx=20" or "dx=20_K=10"
  ExperimentConfig config;
};

// Expands list-valued sweepable keys. `sweep_mode = product` (default) takes
// the Cartesian product; `sweep_mode = one_at_a_time` holds every list at its
// first value and varies one key at a time.
std::vector<SweepPoint> expand_sweep(const KeyValues& kv);

}  // namespace rcdp
