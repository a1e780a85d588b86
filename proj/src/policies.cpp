#include "rcdp/policies.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rcdp/environment.hpp"

namespace rcdp {

std::string_view to_string(PolicyType p) {
  switch (p) {
    case PolicyType::RcdpUcb: return "rcdp_ucb";
    case PolicyType::Rcdb: return "rcdb";
    case PolicyType::Colstim: return "colstim";
    case PolicyType::MaxInP: return "maxinp";
    case PolicyType::MaxPairUcb: return "maxpairucb";
  }
  return "?";
}

PolicyType parse_policy(std::string_view s) {
  for (PolicyType p : all_policies()) {
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown policy: " + std::string(s));
}

std::vector<PolicyType> all_policies() {
  return {PolicyType::RcdpUcb, PolicyType::Rcdb, PolicyType::Colstim, PolicyType::MaxInP, PolicyType::MaxPairUcb};
}

namespace {

// Rows are arm features; returns (scores, G) with G = Z m^{-1} Z^T so that
// ||z_a - z_b||^2_{m^{-1}} = G_aa + G_bb - 2 G_ab.
struct ArmGeometry {
  Vector score;
  Matrix gram;

  ArmGeometry(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z) {
    const Eigen::Index K = static_cast<Eigen::Index>(z.size());
    if (K == 0) throw std::invalid_argument("selection over an empty arm set");
    Matrix Z(K, theta.size());
    for (Eigen::Index k = 0; k < K; ++k) {
      if (z[k].size() != theta.size()) throw LinalgError("selection: feature dimension mismatch");
      Z.row(k) = z[k].transpose();
    }
    score = Z * theta;
    gram = Z * m.inv() * Z.transpose();
  }

  double dist(Eigen::Index a, Eigen::Index b) const {
    const double q = gram(a, a) + gram(b, b) - 2.0 * gram(a, b);
    return q > 0.0 ? std::sqrt(q) : 0.0;
  }

  Eigen::Index greedy() const {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < score.size(); ++k) {
      if (score(k) > score(best)) best = k;
    }
    return best;
  }
};

DuelChoice make_choice(const std::vector<Vector>& z, Eigen::Index a, Eigen::Index b) {
  DuelChoice c;
  c.a = static_cast<int>(a);
  c.b = static_cast<int>(b);
  c.dz_hat = z[a] - z[b];
  return c;
}

DuelChoice best_pair_sum(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta) {
  const ArmGeometry g(theta, m, z);
  const Eigen::Index K = g.score.size();
  Eigen::Index ba = 0, bb = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      const double v = g.score(a) + g.score(b) + beta * g.dist(a, b);
      if (v > best) {
        best = v;
        ba = a;
        bb = b;
      }
    }
  }
  return make_choice(z, ba, bb);
}

}  // namespace

DuelChoice select_rcdp(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& zhat, double width) {
  const ArmGeometry g(theta, m, zhat);
  const Eigen::Index a = g.greedy();
  Eigen::Index b = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < g.score.size(); ++k) {
    const double v = g.score(k) + width * g.dist(k, a);
    if (v > best) {
      best = v;
      b = k;
    }
  }
  return make_choice(zhat, a, b);
}

DuelChoice select_rcdb(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta) {
  return best_pair_sum(theta, m, z, beta);
}

DuelChoice select_maxpairucb(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta) {
  return best_pair_sum(theta, m, z, beta);
}

DuelChoice select_colstim(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double width,
                          CounterRng& rng, double perturbation_scale) {
  const ArmGeometry g(theta, m, z);
  const Eigen::Index K = g.score.size();
  Eigen::Index a = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < K; ++k) {
    const double eps = rng.gumbel();
    const double norm = std::sqrt(std::max(0.0, g.gram(k, k)));
    const double v = g.score(k) + perturbation_scale * eps * norm;
    if (v > best) {
      best = v;
      a = k;
    }
  }
  Eigen::Index b = 0;
  best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < K; ++k) {
    const double v = g.score(k) - g.score(a) + width * g.dist(k, a);
    if (v > best) {
      best = v;
      b = k;
    }
  }
  return make_choice(z, a, b);
}

DuelChoice select_maxinp(const Vector& theta, const SpdMatrixd& m, const std::vector<Vector>& z, double beta) {
  const ArmGeometry g(theta, m, z);
  const Eigen::Index K = g.score.size();
  const Eigen::Index top = g.greedy();
  std::vector<Eigen::Index> promising;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (k == top || g.score(k) + beta * g.dist(k, top) >= g.score(top)) promising.push_back(k);
  }
  Eigen::Index ba = promising.front(), bb = promising.front();
  double best = -1.0;
  for (Eigen::Index a : promising) {
    for (Eigen::Index b : promising) {
      const double v = g.dist(a, b);
      if (v > best) {
        best = v;
        ba = a;
        bb = b;
      }
    }
  }
  return make_choice(z, ba, bb);
}

double instantaneous_regret(const Vector& theta_star, const std::vector<Vector>& zstar, const DuelChoice& choice) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : zstar) best = std::max(best, theta_star.dot(z));
  const double ua = theta_star.dot(zstar.at(choice.a));
  const double ub = theta_star.dot(zstar.at(choice.b));
  return std::max(0.0, 0.5 * ((best - ua) + (best - ub)));
}

// ---------------------------------------------------------------------------

PolicyParams theory_params(PolicyKind kind, int dx, int dy, double lambda, double kappa, double delta,
                           double corruption, double delay, std::optional<double> alpha_override) {
  PolicyParams p;
  p.kind = kind;
  p.dx = dx;
  p.dy = dy;
  p.lambda = lambda;
  p.kappa = kappa;
  p.delta = delta;
  const int d = p.dim();
  switch (kind.type) {
    case PolicyType::RcdpUcb:
      p.basis = WeightBasis::Phantom;
      p.corruption = corruption;
      p.delay = delay;
      p.alpha = alpha_override ? *alpha_override : tuned_alpha(d, corruption, delay);
      break;
    case PolicyType::Rcdb:
      p.basis = WeightBasis::Observed;
      p.corruption = corruption;
      p.delay = 0.0;
      p.alpha = alpha_override ? *alpha_override : tuned_alpha(d, std::max(corruption, 1.0), 0.0);
      break;
    default:
      p.basis = WeightBasis::Observed;
      break;
  }
  return p;
}

DuelingPolicy::DuelingPolicy(const PolicyParams& params)
    : params_(params),
      est_(EstimatorConfig{params.dim(), params.lambda, params.kappa, params.alpha, params.M, params.mle,
                           params.basis}),
      rng_(params.seed, Stream::Policy, static_cast<std::uint64_t>(params.kind.type)) {
  if (!(params.kind.exploration_mult > 0.0)) throw std::invalid_argument("exploration_mult must be > 0");
  if (params.kind.uses_postserving && params.dy > 0) {
    ApproximatorKind ak = params.approximator;
    ak.seed = params.seed;
    approx_ = make_approximator(ak, params.dx, params.dy);
  }
}

std::vector<Vector> DuelingPolicy::features(const RoundContexts& ctx) const {
  std::vector<Vector> z;
  z.reserve(ctx.pre.size());
  for (const auto& x : ctx.pre) {
    if (!approx_) {
      z.push_back(x);
      continue;
    }
    Vector f(params_.dim());
    f << x, approx_->predict(x);
    z.push_back(std::move(f));
  }
  return z;
}

double DuelingPolicy::beta(int t) const {
  return confidence_radius(params_.dim(), t, params_.lambda, params_.M, params_.delta, params_.alpha,
                           params_.corruption, params_.delay);
}

double DuelingPolicy::exploration_width(int t) const {
  const double factor = params_.kind.type == PolicyType::RcdpUcb ? 2.0 : 1.0;
  return params_.kind.exploration_mult * factor * beta(t);
}

DuelChoice DuelingPolicy::select(int t, const std::vector<Vector>& zhat) {
  const Vector& theta = est_.theta();
  const SpdMatrixd& m = est_.basis();
  const double w = exploration_width(t);
  switch (params_.kind.type) {
    case PolicyType::RcdpUcb: return select_rcdp(theta, m, zhat, w);
    case PolicyType::Rcdb: return select_rcdb(theta, m, zhat, w);
    case PolicyType::Colstim: return select_colstim(theta, m, zhat, w, rng_);
    case PolicyType::MaxInP: return select_maxinp(theta, m, zhat, w);
    case PolicyType::MaxPairUcb: return select_maxpairucb(theta, m, zhat, w);
  }
  throw std::logic_error("unreachable policy type");
}

const FeedbackRecord& DuelingPolicy::observe(int t, const RoundContexts& ctx, DuelChoice& choice) {
  if (approx_) {
    choice.dz_obs = ctx.joint_observed(choice.a) - ctx.joint_observed(choice.b);
    buffer_.add(ctx.pre[choice.a], ctx.post_observed[choice.a]);
    buffer_.add(ctx.pre[choice.b], ctx.post_observed[choice.b]);
  } else {
    choice.dz_obs = ctx.pre[choice.a] - ctx.pre[choice.b];
  }
  return est_.register_duel(t, choice.dz_obs);
}

void DuelingPolicy::end_round() {
  if (approx_ && !buffer_.empty()) approx_->fit_step(buffer_);
  est_.solve_mle();
}

}  // namespace rcdp
