#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcdp/linalg.hpp"
#include "rcdp/rng.hpp"

namespace rcdp {

enum class Mapping { Linear, Polynomial, Sinusoidal, Absolute };

std::string_view to_string(Mapping m);
Mapping parse_mapping(std::string_view s);

struct EnvConfig {
  int dx = 10;
  int dy = 0;  // only consulted by Linear; the other mappings fix dy from dx
  int K = 10;
  int T = 2000;
  Mapping mapping = Mapping::Linear;
  double noise_std = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

// Post-serving dimension implied by a mapping.
int post_dim(Mapping m, int dx, int linear_dy);

// Unscaled ground-truth map phi_* applied to a raw pre-serving context in [-pi, pi]^dx.
// `linear_map` (dx x dy) is only used by Mapping::Linear.
Vector apply_mapping(Mapping m, const Vector& x, const Matrix& linear_map);

// Square of an upper bound on sup ||(x, phi_*(x))||_2 over [-pi, pi]^dx.
double joint_sup_norm_sq(Mapping m, int dx, const Matrix& linear_map);

struct RoundContexts {
  std::vector<Vector> pre;            // scaled x_{t,k}
  std::vector<Vector> post_true;      // scaled phi_*(x_{t,k})
  std::vector<Vector> post_observed;  // post_true + noise

  Vector joint_true(int k) const;
  Vector joint_observed(int k) const;
};

inline double utility(const Vector& theta, const Vector& z) {
  if (theta.size() != z.size()) throw LinalgError("utility: dimension mismatch");
  return theta.dot(z);
}

// Draws a BTL preference bit: 1 with probability g(<theta, za - zb>).
int sample_preference(const Vector& theta, const Vector& za, const Vector& zb, CounterRng& rng);

// Standard normal vector of length d normalized to unit L2 norm.
Vector make_theta_star(int d, CounterRng& rng);

// The synthetic contextual dueling environment of one seed.
//
// Pre-serving contexts are drawn uniformly from [-pi, pi]^dx and mapped
// through phi_*. Both parts are multiplied by one deterministic scale so that
// every noise-free joint feature lies in the radius-1/2 ball.
class Environment {
 public:
  explicit Environment(const EnvConfig& cfg);

  const EnvConfig& config() const { return cfg_; }
  int dx() const { return cfg_.dx; }
  int dy() const { return dy_; }
  int dim() const { return cfg_.dx + dy_; }
  double scale() const { return scale_; }
  const Vector& theta_star() const { return theta_star_; }
  const Matrix& linear_map() const { return linear_map_; }

  // Scaled noise-free post-serving context for a scaled pre-serving context.
  Vector truth(const Vector& scaled_x) const;

  RoundContexts sample_round(int t) const;

 private:
  EnvConfig cfg_;
  int dy_;
  Matrix linear_map_;
  double scale_;
  Vector theta_star_;
};

}  // namespace rcdp
