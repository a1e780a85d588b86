#include "rcdp/estimator.hpp"

#include <cmath>
#include <string>

#include "rcdp/link.hpp"

namespace rcdp {

std::string_view to_string(MleMode m) { return m == MleMode::BatchNewton ? "newton" : "streaming"; }

MleMode parse_mle_mode(std::string_view s) {
  if (s == "newton" || s == "batch_newton") return MleMode::BatchNewton;
  if (s == "streaming" || s == "streaming_step") return MleMode::StreamingStep;
  throw std::invalid_argument("unknown mle mode: " + std::string(s));
}

EstimatorState::EstimatorState(const EstimatorConfig& cfg)
    : cfg_(cfg),
      theta_(Vector::Zero(cfg.dim)),
      V_(cfg.dim, cfg.lambda),
      W_(cfg.dim, cfg.lambda) {
  if (cfg.dim < 1) throw std::invalid_argument("EstimatorState: dim must be >= 1");
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("EstimatorState: kappa must be > 0");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("EstimatorState: alpha must be > 0");
}

const FeedbackRecord& EstimatorState::record(int round) const {
  auto it = index_.find(round);
  if (it == index_.end()) throw std::out_of_range("no record for round " + std::to_string(round));
  return records_[it->second];
}

double EstimatorState::compute_weight(const Vector& dz) const {
  if (!dz.allFinite()) throw LinalgError("compute_weight: non-finite dz");
  if (std::isinf(cfg_.alpha)) return 1.0;
  const double n = mahalanobis_inv(basis(), dz);
  if (n <= 0.0) return 1.0;
  return std::min(1.0, cfg_.alpha / n);
}

void EstimatorState::phantom_update(const Vector& dz, double w) {
  V_.rank1_update(dz, cfg_.kappa * w);
}

const FeedbackRecord& EstimatorState::register_duel(int round, const Vector& dz) {
  if (index_.count(round)) throw std::invalid_argument("duplicate round " + std::to_string(round));
  FeedbackRecord rec;
  rec.round = round;
  rec.dz = dz;
  rec.norm = mahalanobis_inv(basis(), dz);
  rec.weight = compute_weight(dz);
  phantom_update(dz, rec.weight);
  index_[round] = records_.size();
  records_.push_back(std::move(rec));
  return records_.back();
}

void EstimatorState::arrival_update(int round, int outcome) {
  auto it = index_.find(round);
  if (it == index_.end()) throw std::out_of_range("arrival for unknown round " + std::to_string(round));
  FeedbackRecord& rec = records_[it->second];
  if (rec.arrived) throw std::logic_error("double arrival for round " + std::to_string(round));
  rec.arrived = true;
  rec.outcome = outcome;
  W_.rank1_update(rec.dz, cfg_.kappa * rec.weight);
  arrived_.push_back(it->second);
}

Vector EstimatorState::estimating_residual(const Vector& theta) const {
  Vector r = cfg_.lambda * theta;
  for (std::size_t i : arrived_) {
    const auto& rec = records_[i];
    r += rec.weight * (logistic(theta.dot(rec.dz)) - *rec.outcome) * rec.dz;
  }
  return r;
}

double EstimatorState::objective(const Vector& theta) const {
  double f = 0.5 * cfg_.lambda * theta.squaredNorm();
  for (std::size_t i : arrived_) {
    const auto& rec = records_[i];
    const double s = theta.dot(rec.dz);
    f -= rec.weight * log_logistic(*rec.outcome ? s : -s);
  }
  return f;
}

const Vector& EstimatorState::solve_mle(MleMode mode, const NewtonOptions& opts) {
  if (mode == MleMode::StreamingStep) {
    for (; streamed_ < arrived_.size(); ++streamed_) {
      const auto& rec = records_[arrived_[streamed_]];
      const double resid = *rec.outcome - logistic(theta_.dot(rec.dz));
      theta_.noalias() += W_.inv() * (rec.weight * resid * rec.dz);
    }
    return theta_;
  }
  streamed_ = arrived_.size();
  if (arrived_.empty()) {
    theta_.setZero();
    return theta_;
  }
  std::vector<Vector> dz;
  std::vector<double> w;
  std::vector<int> o;
  dz.reserve(arrived_.size());
  w.reserve(arrived_.size());
  o.reserve(arrived_.size());
  for (std::size_t i : arrived_) {
    dz.push_back(records_[i].dz);
    w.push_back(records_[i].weight);
    o.push_back(*records_[i].outcome);
  }
  theta_ = newton_mle(dz, w, o, cfg_.lambda, theta_, opts);
  return theta_;
}

Vector newton_mle(const std::vector<Vector>& dz, const std::vector<double>& w, const std::vector<int>& o,
                  double lambda, const Vector& start, const NewtonOptions& opts) {
  const Eigen::Index d = start.size();
  const std::size_t n = dz.size();
  auto objective = [&](const Vector& th) {
    double f = 0.5 * lambda * th.squaredNorm();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = th.dot(dz[i]);
      f -= w[i] * log_logistic(o[i] ? s : -s);
    }
    return f;
  };

  Vector theta = start;
  double f = objective(theta);
  double residual = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vector grad = lambda * theta;
    Matrix hess = lambda * Matrix::Identity(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = theta.dot(dz[i]);
      grad += w[i] * (logistic(s) - o[i]) * dz[i];
      hess.selfadjointView<Eigen::Lower>().rankUpdate(dz[i], w[i] * logistic_derivative(s));
    }
    residual = grad.norm();
    if (residual <= opts.tolerance) return theta;
    const Vector step = hess.selfadjointView<Eigen::Lower>().llt().solve(grad);
    // Armijo backtracking on the strictly convex objective.
    const double slope = grad.dot(step);
    if (slope < 1e-12 * (1.0 + std::abs(f))) {
      // Inside the quadratic-convergence region the objective decrease is
      // below rounding; take the pure Newton step.
      theta -= step;
      f = objective(theta);
      continue;
    }
    double t = 1.0;
    Vector next = theta - step;
    double fn = objective(next);
    while (fn > f - 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      next = theta - t * step;
      fn = objective(next);
    }
    if (fn > f) break;  // no descent at double precision
    theta = next;
    f = fn;
  }
  Vector grad = lambda * theta;
  for (std::size_t i = 0; i < n; ++i) grad += w[i] * (logistic(theta.dot(dz[i])) - o[i]) * dz[i];
  residual = grad.norm();
  if (residual <= opts.tolerance) return theta;
  throw MleNonConvergence("newton_mle: no convergence after " + std::to_string(opts.max_iterations) +
                              " iterations, residual " + std::to_string(residual),
                          residual);
}

double confidence_radius(int d, int t, double lambda, double M, double delta, double alpha,
                         double corruption, double delay) {
  if (t < 1) throw std::invalid_argument("confidence_radius: t must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence_radius: delta must be in (0,1)");
  const double stat = 0.5 * std::sqrt(d * std::log((1.0 + double(t) / (d * lambda)) / delta));
  double beta = stat + std::sqrt(lambda) * M;
  if (std::isfinite(alpha)) beta += alpha * corruption + alpha * delay;
  return beta;
}

double tuned_alpha(int d, double corruption, double delay) {
  const double budget = corruption + delay;
  if (!(budget > 0.0)) throw std::invalid_argument("tuned_alpha: C + D must be positive");
  return std::sqrt(double(d)) / budget;
}

double elliptic_potential_bound(int d, int T, double kappa, double lambda) {
  return (2.0 / kappa) * d * std::log(1.0 + kappa * T / (d * lambda));
}

}  // namespace rcdp
