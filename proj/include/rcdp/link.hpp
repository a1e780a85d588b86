#pragma once

#include <algorithm>
#include <cmath>

namespace rcdp {

// Logistic (Bradley-Terry-Luce) link g(s) = 1 / (1 + exp(-s)).
inline double logistic(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

inline double logistic_derivative(double s) {
  const double g = logistic(s);
  return g * (1.0 - g);
}

// log g(s), stable for large |s|.
inline double log_logistic(double s) {
  return s >= 0.0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
}

// Piecewise-linear link sigma_kappa(s) = clamp(1/2 + kappa * s, 0, 1).
inline double piecewise_linear_link(double s, double kappa) {
  return std::clamp(0.5 + kappa * s, 0.0, 1.0);
}

// Lower bound on the logistic derivative over margins in [-max_margin, max_margin].
inline double kappa_for_margin(double max_margin) { return logistic_derivative(max_margin); }

}  // namespace rcdp
