#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcdp/linalg.hpp"

namespace rcdp {

enum class MleMode { BatchNewton, StreamingStep };

std::string_view to_string(MleMode m);
MleMode parse_mle_mode(std::string_view s);

// Which design matrix drives selection widths and weights.
//   Phantom:  V, updated when a duel is played (independent of arrivals).
//   Observed: W, updated only when the outcome arrives.
enum class WeightBasis { Phantom, Observed };

class MleNonConvergence : public std::runtime_error {
 public:
  MleNonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct FeedbackRecord {
  int round = 0;
  Vector dz;
  double weight = 1.0;
  double norm = 0.0;  // ||dz|| in the inverse weighting matrix at registration
  std::optional<int> outcome;
  bool arrived = false;
};

struct EstimatorConfig {
  int dim = 1;
  double lambda = 1.0;
  double kappa = 0.1;
  // Clipping threshold; +infinity disables weighting (all weights 1).
  double alpha = std::numeric_limits<double>::infinity();
  double M = 1.0;
  MleMode mode = MleMode::StreamingStep;
  WeightBasis basis = WeightBasis::Phantom;
};

struct NewtonOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
};

// Weighted regularized logistic MLE over the observed-feedback history plus
// the full-history (V) and observed-history (W) design matrices.
class EstimatorState {
 public:
  explicit EstimatorState(const EstimatorConfig& cfg);

  const EstimatorConfig& config() const { return cfg_; }
  int dim() const { return cfg_.dim; }
  const Vector& theta() const { return theta_; }
  const SpdMatrixd& V() const { return V_; }
  const SpdMatrixd& W() const { return W_; }
  // Matrix used for selection widths and weights.
  const SpdMatrixd& basis() const { return cfg_.basis == WeightBasis::Phantom ? V_ : W_; }
  const std::vector<FeedbackRecord>& history() const { return records_; }
  const FeedbackRecord& record(int round) const;

  // min(1, alpha / ||dz||_{basis^{-1}}); 1 when dz = 0.
  double compute_weight(const Vector& dz) const;

  // V += kappa * w * dz dz^T.
  void phantom_update(const Vector& dz, double w);

  // Weights dz against the current basis, phantom-updates V, and stores the
  // pending record. Returns the stored record.
  const FeedbackRecord& register_duel(int round, const Vector& dz);

  // W += kappa * w_s * dz_s dz_s^T for a record whose outcome just arrived.
  void arrival_update(int round, int outcome);

  // Refits theta from the arrived records.
  const Vector& solve_mle(MleMode mode, const NewtonOptions& opts = {});
  const Vector& solve_mle() { return solve_mle(cfg_.mode); }

  // lambda * theta + sum_{arrived} w_s (g(theta^T dz_s) - o_s) dz_s
  Vector estimating_residual(const Vector& theta) const;
  double objective(const Vector& theta) const;

  void set_theta(const Vector& theta) { theta_ = theta; }

 private:
  EstimatorConfig cfg_;
  Vector theta_;
  SpdMatrixd V_;
  SpdMatrixd W_;
  std::vector<FeedbackRecord> records_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<std::size_t> arrived_;  // indices in arrival order
  std::size_t streamed_ = 0;          // arrived_ prefix already consumed by StreamingStep
};

// Standalone damped Newton solve of the weighted regularized logistic MLE.
Vector newton_mle(const std::vector<Vector>& dz, const std::vector<double>& w, const std::vector<int>& o,
                  double lambda, const Vector& start, const NewtonOptions& opts = {});

// beta_t = 1/2 sqrt(d log((1 + t/(d lambda)) / delta)) + sqrt(lambda) M + alpha C + alpha D.
// Infinite alpha contributes nothing (an unweighted estimator).
double confidence_radius(int d, int t, double lambda, double M, double delta, double alpha,
                         double corruption, double delay);

// alpha = sqrt(d) / (C + D).
double tuned_alpha(int d, double corruption, double delay);

// Elliptic potential bound (2 / kappa) d log(1 + kappa T / (d lambda)).
double elliptic_potential_bound(int d, int T, double kappa, double lambda);

}  // namespace rcdp
