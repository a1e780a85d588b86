#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcdp/approximator.hpp"
#include "rcdp/environment.hpp"
#include "rcdp/estimator.hpp"
#include "rcdp/linalg.hpp"
#include "rcdp/rng.hpp"

namespace rcdp {

enum class PolicyType { RcdpUcb, Rcdb, Colstim, MaxInP, MaxPairUcb };

std::string_view to_string(PolicyType p);
PolicyType parse_policy(std::string_view s);
std::vector<PolicyType> all_policies();

struct PolicyKind {
  PolicyType type = PolicyType::RcdpUcb;
  bool uses_postserving = true;
  double exploration_mult = 1.0;
};

struct DuelChoice {
  int a = 0;
  int b = 0;
  Vector dz_hat;  // zhat_a - zhat_b used for selection
  Vector dz_obs;  // observed z_a - z_b after the post-serving reveal
};

// a = argmax <theta, zhat_k>;
// b = argmax <theta, zhat_k> + width * ||zhat_k - zhat_a||_{m^{-1}}.
// Ties go to the lowest index. `width` is the exploration width c_t (= 2 beta_t).
DuelChoice select_rcdp(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& zhat, double width);

// argmax over ordered pairs of (z_a + z_b)^T theta + beta ||z_a - z_b||_{m^{-1}}.
DuelChoice select_rcdb(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta);

// Same objective as RCDB; kept separate because the estimator behind it is unweighted.
DuelChoice select_maxpairucb(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta);

// a = argmax theta^T z_k + scale * G_k ||z_k||_{m^{-1}}, G_k ~ Gumbel(0,1);
// b = argmax theta^T (z_k - z_a) + width ||z_k - z_a||_{m^{-1}}.
DuelChoice select_colstim(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double width,
                          CounterRng& rng, double perturbation_scale = 1.0);

// Promising set {k : <theta, z_k> + beta ||z_k - z_khat|| >= <theta, z_khat>}, then
// the max ||z_a - z_b||_{m^{-1}} pair inside it.
DuelChoice select_maxinp(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta);

// 1/2 (<theta_*, z*_{k*} - z*_a> + <theta_*, z*_{k*} - z*_b>) on noise-free features.
double instantaneous_regret(const Vector& theta_star, const std::vector<Vector>& zstar, const DuelChoice& choice);

// Everything a policy needs besides the round data.
struct PolicyParams {
  PolicyKind kind;
  int dx = 10;
  int dy = 0;          // post-serving dimension offered by the environment
  double lambda = 1.0;
  double kappa = 0.1;
  double M = 1.0;
  double delta = 0.05;
  double alpha = std::numeric_limits<double>::infinity();
  double corruption = 0.0;  // C entering beta
  double delay = 0.0;       // D entering beta
  MleMode mle = MleMode::StreamingStep;
  WeightBasis basis = WeightBasis::Observed;
  ApproximatorKind approximator;
  std::uint64_t seed = 0;

  // Feature dimension the policy learns over.
  int dim() const { return dx + (kind.uses_postserving ? dy : 0); }
};

// Builds the theory-prescribed parameters for a policy type.
//   RCDP-UCB: phantom basis, alpha = sqrt(d) / (C + D), beta carries alpha (C + D).
//   RCDB:     observed basis, alpha = sqrt(d) / C, beta carries alpha C.
//   others:   observed basis, unweighted.
PolicyParams theory_params(PolicyKind kind, int dx, int dy, double lambda, double kappa, double delta,
                           double corruption, double delay, std::optional<double> alpha_override = {});

// One learner: estimator, optional post-serving approximator, replay buffer.
class DuelingPolicy {
 public:
  explicit DuelingPolicy(const PolicyParams& params);

  const PolicyParams& params() const { return params_; }
  const EstimatorState& estimator() const { return est_; }
  EstimatorState& estimator() { return est_; }
  const Approximator* approximator() const { return approx_.get(); }
  const ReplayBuffer& buffer() const { return buffer_; }

  // Selection features zhat for all arms (pre-serving, plus predicted post-serving if used).
  std::vector<Vector> features(const RoundContexts& ctx) const;

  double beta(int t) const;
  double exploration_width(int t) const;

  DuelChoice select(int t, const std::vector<Vector>& zhat);

  // Reveal post-serving contexts of the played arms: fills choice.dz_obs,
  // appends both pairs to the replay buffer, and registers the duel.
  const FeedbackRecord& observe(int t, const RoundContexts& ctx, DuelChoice& choice);

  void arrive(int round, int outcome) { est_.arrival_update(round, outcome); }

  // Model updates at the end of a round: approximator fit, then theta.
  void end_round();

 private:
  PolicyParams params_;
  EstimatorState est_;
  std::unique_ptr<Approximator> approx_;
  ReplayBuffer buffer_;
  CounterRng rng_;
};

}  // namespace rcdp
