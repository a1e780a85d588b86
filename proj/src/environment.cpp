#include "rcdp/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "rcdp/link.hpp"

namespace rcdp {

std::string_view to_string(Mapping m) {
  switch (m) {
    case Mapping::Linear: return "linear";
    case Mapping::Polynomial: return "polynomial";
    case Mapping::Sinusoidal: return "sinusoidal";
    case Mapping::Absolute: return "absolute";
  }
  return "?";
}

Mapping parse_mapping(std::string_view s) {
  if (s == "linear") return Mapping::Linear;
  if (s == "polynomial") return Mapping::Polynomial;
  if (s == "sinusoidal") return Mapping::Sinusoidal;
  if (s == "absolute" || s == "abs") return Mapping::Absolute;
  throw std::invalid_argument("unknown mapping: " + std::string(s));
}

void EnvConfig::validate() const {
  if (dx < 1 || K < 1 || T < 1) throw std::invalid_argument("EnvConfig: dx, K, T must be >= 1");
  if (dy < 0) throw std::invalid_argument("EnvConfig: dy must be >= 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("EnvConfig: noise_std must be >= 0");
}

int post_dim(Mapping m, int dx, int linear_dy) {
  switch (m) {
    case Mapping::Linear: return linear_dy;
    case Mapping::Polynomial: return 2 * dx;
    case Mapping::Sinusoidal: return 2 * dx;
    case Mapping::Absolute: return dx;
  }
  return 0;
}

Vector apply_mapping(Mapping m, const Vector& x, const Matrix& linear_map) {
  const Eigen::Index n = x.size();
  Vector y;
  switch (m) {
    case Mapping::Linear:
      y = linear_map.transpose() * x;
      break;
    case Mapping::Polynomial:
      y.resize(2 * n);
      y.head(n) = x.array().square();
      y.tail(n) = x.array().abs().sqrt();
      break;
    case Mapping::Sinusoidal:
      y.resize(2 * n);
      y.head(n) = x.array().cos();
      y.tail(n) = x.array().sin();
      break;
    case Mapping::Absolute:
      y = x.cwiseAbs();
      break;
  }
  return y;
}

double joint_sup_norm_sq(Mapping m, int dx, const Matrix& linear_map) {
  const double pi2 = M_PI * M_PI;
  const double pre = dx * pi2;
  switch (m) {
    case Mapping::Linear: {
      if (linear_map.size() == 0) return pre;
      const double op = Eigen::JacobiSVD<Matrix>(linear_map).singularValues()(0);
      return pre + op * op * pre;
    }
    case Mapping::Polynomial: return pre + dx * (pi2 * pi2 + M_PI);
    case Mapping::Sinusoidal: return pre + dx * 1.0;
    case Mapping::Absolute: return 2.0 * pre;
  }
  return pre;
}

Vector RoundContexts::joint_true(int k) const {
  Vector z(pre[k].size() + post_true[k].size());
  z << pre[k], post_true[k];
  return z;
}

Vector RoundContexts::joint_observed(int k) const {
  Vector z(pre[k].size() + post_observed[k].size());
  z << pre[k], post_observed[k];
  return z;
}

int sample_preference(const Vector& theta, const Vector& za, const Vector& zb, CounterRng& rng) {
  if (za.size() != zb.size() || theta.size() != za.size()) {
    throw LinalgError("sample_preference: dimension mismatch");
  }
  const double p = logistic(theta.dot(za - zb));
  return rng.uniform() < p ? 1 : 0;
}

Vector make_theta_star(int d, CounterRng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.normal();
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

Environment::Environment(const EnvConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  dy_ = post_dim(cfg_.mapping, cfg_.dx, cfg_.dy);
  if (cfg_.mapping == Mapping::Linear && dy_ > 0) {
    CounterRng rng(cfg_.seed, Stream::Mapping);
    linear_map_.resize(cfg_.dx, dy_);
    for (Eigen::Index i = 0; i < linear_map_.size(); ++i) linear_map_.data()[i] = rng.normal();
    linear_map_ /= std::sqrt(double(cfg_.dx));
  } else {
    linear_map_.resize(cfg_.dx, 0);
  }
  scale_ = 0.5 / std::sqrt(joint_sup_norm_sq(cfg_.mapping, cfg_.dx, linear_map_));
  CounterRng trng(cfg_.seed, Stream::Theta);
  theta_star_ = make_theta_star(dim(), trng);
}

Vector Environment::truth(const Vector& scaled_x) const {
  return scale_ * apply_mapping(cfg_.mapping, scaled_x / scale_, linear_map_);
}

RoundContexts Environment::sample_round(int t) const {
  if (t < 1 || t > cfg_.T) throw std::out_of_range("sample_round: round out of range");
  CounterRng rng(cfg_.seed, Stream::Context, static_cast<std::uint64_t>(t));
  RoundContexts rc;
  rc.pre.reserve(cfg_.K);
  rc.post_true.reserve(cfg_.K);
  rc.post_observed.reserve(cfg_.K);
  for (int k = 0; k < cfg_.K; ++k) {
    Vector x(cfg_.dx);
    for (int i = 0; i < cfg_.dx; ++i) x(i) = rng.uniform(-M_PI, M_PI);
    Vector y = scale_ * apply_mapping(cfg_.mapping, x, linear_map_);
    Vector yo = y;
    for (Eigen::Index i = 0; i < yo.size(); ++i) yo(i) += rng.normal(0.0, cfg_.noise_std);
    rc.pre.push_back(scale_ * x);
    rc.post_true.push_back(std::move(y));
    rc.post_observed.push_back(std::move(yo));
  }
  return rc;
}

}  // namespace rcdp
