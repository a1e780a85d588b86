#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "rcdp/adversary.hpp"
#include "rcdp/estimator.hpp"
#include "rcdp/link.hpp"
#include "rcdp/rng.hpp"

using namespace rcdp;

namespace {

EstimatorConfig config(int d, double alpha, WeightBasis basis = WeightBasis::Phantom) {
  EstimatorConfig c;
  c.dim = d;
  c.lambda = 1.0;
  c.kappa = 0.1;
  c.alpha = alpha;
  c.basis = basis;
  return c;
}

Vector random_vector(int d, CounterRng& rng, double s = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = s * rng.normal();
  return v;
}

// Root of the strictly increasing scalar estimating equation by bisection.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Weight, Examples) {
  EstimatorState st(config(3, 0.5));
  EXPECT_DOUBLE_EQ(st.compute_weight(Vector::Unit(3, 0) * 0.1), 1.0);
  EstimatorState st2(config(3, 0.25));
  EXPECT_DOUBLE_EQ(st2.compute_weight(Vector::Unit(3, 1) * 0.5), 0.5);
  EXPECT_DOUBLE_EQ(st2.compute_weight(Vector::Zero(3)), 1.0);
  Vector bad = Vector::Zero(3);
  bad(0) = INFINITY;
  EXPECT_THROW(st2.compute_weight(bad), LinalgError);
}

TEST(Weight, SoftConstraintIdentity) {
  CounterRng rng(1, Stream::Instance);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 1 + trial % 6;
    const double alpha = rng.uniform(0.05, 2.0);
    EstimatorState st(config(d, alpha));
    for (int i = 0; i < trial % 5; ++i) st.register_duel(i + 1, random_vector(d, rng));
    const Vector dz = random_vector(d, rng, rng.uniform(0.01, 5.0));
    const double n = mahalanobis_inv(st.basis(), dz);
    const double w = st.compute_weight(dz);
    ASSERT_GT(w, 0.0);
    ASSERT_LE(w, 1.0);
    const double scaled = std::sqrt(w) * n;
    EXPECT_NEAR(scaled, std::min(n, std::sqrt(alpha * n)), 1e-12);
    EXPECT_LE(scaled, std::max(alpha, n) + 1e-12);
    if (w < 1.0) {
      EXPECT_LE(w * n, alpha * (1 + 1e-12));
    }
  }
}

TEST(Phantom, DiagonalExample) {
  EstimatorState st(config(2, INFINITY));
  st.phantom_update(Vector::Unit(2, 0), 1.0);
  EXPECT_NEAR(st.V().mat()(0, 0), 1.1, 1e-15);
  EXPECT_NEAR(st.V().mat()(1, 1), 1.0, 1e-15);
  st.phantom_update(Vector::Zero(2), 1.0);
  EXPECT_NEAR(st.V().mat()(0, 0), 1.1, 1e-15);
  // No arrivals, W untouched.
  EXPECT_EQ(st.W().mat(), Matrix::Identity(2, 2));
}

TEST(Phantom, TraceAccounting) {
  CounterRng rng(2, Stream::Instance);
  const int d = 5;
  EstimatorState st(config(d, 0.3));
  double expected = d * 1.0;
  for (int t = 1; t <= 300; ++t) {
    const auto& rec = st.register_duel(t, random_vector(d, rng, 0.5));
    expected += 0.1 * rec.weight * rec.dz.squaredNorm();
  }
  EXPECT_NEAR(st.V().mat().trace(), expected, 1e-9 * expected);
}

TEST(Arrival, ZeroDelayWorldKeepsWEqualV) {
  CounterRng rng(3, Stream::Instance);
  EstimatorState st(config(4, 0.4));
  for (int t = 1; t <= 200; ++t) {
    st.register_duel(t, random_vector(4, rng));
    st.arrival_update(t, t % 2);
    ASSERT_LT(max_abs(st.W().mat() - st.V().mat()), 1e-9) << t;
  }
  EXPECT_THROW(st.arrival_update(5, 1), std::logic_error);
  EXPECT_THROW(st.arrival_update(999, 1), std::out_of_range);
  EXPECT_THROW(st.register_duel(5, Vector::Ones(4)), std::invalid_argument);
}

TEST(Arrival, StarvationKeepsWAtRidge) {
  CounterRng rng(4, Stream::Instance);
  const int d = 3;
  EstimatorState st(config(d, 0.2, WeightBasis::Phantom));
  DelayPolicy delays = DelayPolicy::strategic(10000);
  FeedbackQueue q;
  const long M = delays.blind_length();
  for (int t = 1; t <= 200; ++t) {
    st.register_duel(t, random_vector(d, rng));
    q.push(t, delays.assign_delay(t), 1);
    for (const auto& a : q.tick(t)) st.arrival_update(a.round, a.outcome);
    if (t <= M) {
      ASSERT_EQ(st.W().mat(), Matrix::Identity(d, d)) << t;
    }
    // V dominates W: min eigenvalue of V - W is non-negative.
    const Eigen::SelfAdjointEigenSolver<Matrix> es(st.V().mat() - st.W().mat());
    ASSERT_GE(es.eigenvalues().minCoeff(), -1e-9) << t;
  }
  EXPECT_GT(st.W().mat().trace(), double(d));
}

TEST(Mle, NoDataGivesZero) {
  EstimatorState st(config(3, INFINITY));
  st.set_theta(Vector::Ones(3));
  EXPECT_EQ(st.solve_mle(MleMode::BatchNewton), Vector::Zero(3));
  st.register_duel(1, Vector::Ones(3));  // registered but not arrived
  EXPECT_EQ(st.solve_mle(MleMode::BatchNewton), Vector::Zero(3));
}

TEST(Mle, OneDimensionalBisectionOracle) {
  EstimatorState st(config(1, INFINITY));
  Vector dz(1);
  dz << 0.4;
  st.register_duel(1, dz);
  st.arrival_update(1, 1);
  const double theta = st.solve_mle(MleMode::BatchNewton)(0);
  const double root = bisect([](double x) { return x + (logistic(0.4 * x) - 1.0) * 0.4; }, -10.0, 10.0);
  EXPECT_NEAR(theta, root, 1e-8);
}

TEST(Mle, OneDimensionalWeightedOracle) {
  CounterRng rng(5, Stream::Instance);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial * 7;
    std::vector<Vector> dz;
    std::vector<double> w;
    std::vector<int> o;
    for (int i = 0; i < n; ++i) {
      Vector v(1);
      v << rng.normal();
      dz.push_back(v);
      w.push_back(rng.uniform(0.05, 1.0));
      o.push_back(rng.uniform() < 0.6);
    }
    const double lambda = rng.uniform(0.1, 2.0);
    const double root = bisect(
        [&](double x) {
          double r = lambda * x;
          for (int i = 0; i < n; ++i) r += w[i] * (logistic(x * dz[i](0)) - o[i]) * dz[i](0);
          return r;
        },
        -1e3, 1e3);
    EXPECT_NEAR(newton_mle(dz, w, o, lambda, Vector::Zero(1))(0), root, 1e-8) << trial;
  }
}

TEST(Mle, RandomInstanceResidual) {
  CounterRng rng(6, Stream::Instance);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 10;
    const int n = 1 + (trial * 37) % 200;
    EstimatorState st(config(d, rng.uniform(0.1, 3.0)));
    const Vector truth = random_vector(d, rng);
    for (int t = 1; t <= n; ++t) {
      const Vector v = random_vector(d, rng);
      st.register_duel(t, v);
      st.arrival_update(t, rng.uniform() < logistic(truth.dot(v)));
    }
    const Vector& theta = st.solve_mle(MleMode::BatchNewton);
    EXPECT_LE(st.estimating_residual(theta).norm(), 1e-8) << trial;
    // The root is the minimizer: perturbations cannot decrease the objective.
    const double f = st.objective(theta);
    for (int k = 0; k < d; ++k) EXPECT_GE(st.objective(theta + 1e-3 * Vector::Unit(d, k)), f);
  }
}

TEST(Mle, StreamingTracksBatchOnWellPosedData) {
  CounterRng rng(7, Stream::Instance);
  const int d = 3;
  const Vector truth = Vector::Constant(d, 1.0 / std::sqrt(3.0));
  EstimatorState st(config(d, INFINITY));
  for (int t = 1; t <= 3000; ++t) {
    const Vector v = random_vector(d, rng);
    st.register_duel(t, v);
    st.arrival_update(t, rng.uniform() < logistic(truth.dot(v)));
    st.solve_mle(MleMode::StreamingStep);
  }
  const Vector stream = st.theta();
  const Vector batch = st.solve_mle(MleMode::BatchNewton);
  EXPECT_LT((stream - batch).norm(), 0.2);
  EXPECT_LT((batch - truth).norm(), 0.2);
}

TEST(Mle, NonConvergenceCarriesResidual) {
  std::vector<Vector> dz{Vector::Ones(2)};
  NewtonOptions opts;
  opts.max_iterations = 0;
  opts.tolerance = 1e-30;
  try {
    newton_mle(dz, {1.0}, {1}, 1.0, Vector::Zero(2), opts);
    FAIL() << "expected MleNonConvergence";
  } catch (const MleNonConvergence& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(ConfidenceRadius, Example) {
  const double beta = confidence_radius(1, 1, 1.0, 1.0, std::exp(-1.0), 0.0, 0.0, 0.0);
  EXPECT_NEAR(beta, 0.5 * std::sqrt(1.0 + std::log(2.0)) + 1.0, 1e-14);
  EXPECT_NEAR(beta, 1.6506, 5e-5);
}

TEST(ConfidenceRadius, MonotoneInT) {
  double prev = 0.0;
  for (int t = 1; t <= 5000; ++t) {
    const double b = confidence_radius(10, t, 1.0, 1.0, 0.05, 0.02, 25, 100);
    ASSERT_GT(b, prev);
    prev = b;
  }
  EXPECT_THROW(confidence_radius(1, 0, 1, 1, 0.05, 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(confidence_radius(1, 1, 1, 1, 1.0, 0, 0, 0), std::invalid_argument);
}

TEST(ConfidenceRadius, TunedAlphaCancels) {
  for (int d : {1, 10, 20}) {
    const double alpha = tuned_alpha(d, 25, 100);
    EXPECT_NEAR(alpha, std::sqrt(double(d)) / 125.0, 1e-15);
    const double with = confidence_radius(d, 50, 1.0, 1.0, 0.05, alpha, 25, 100);
    const double without = confidence_radius(d, 50, 1.0, 1.0, 0.05, 0.0, 25, 100);
    EXPECT_NEAR(with - without, std::sqrt(double(d)), 1e-12);
  }
  EXPECT_THROW(tuned_alpha(3, 0, 0), std::invalid_argument);
}

// With no corruption, no delay and no post-serving part, the phantom and
// observed bases coincide at every registration, so the RCDP-UCB estimator
// and the RCDB weighted estimator see identical weights and identical fits.
TEST(Equivalence, PhantomAndObservedBasesAgreeWithoutDelay) {
  CounterRng rng(8, Stream::Instance);
  const int d = 4;
  const double alpha = 0.3;
  EstimatorState rcdp(config(d, alpha, WeightBasis::Phantom)), rcdb(config(d, alpha, WeightBasis::Observed));
  const Vector truth = random_vector(d, rng);
  for (int t = 1; t <= 300; ++t) {
    const Vector v = random_vector(d, rng);
    const auto& ra = rcdp.register_duel(t, v);
    const auto& rb = rcdb.register_duel(t, v);
    ASSERT_NEAR(ra.weight, rb.weight, 1e-12) << t;
    const int o = rng.uniform() < logistic(truth.dot(v));
    rcdp.arrival_update(t, o);
    rcdb.arrival_update(t, o);
    rcdp.solve_mle(MleMode::BatchNewton);
    rcdb.solve_mle(MleMode::BatchNewton);
    ASSERT_LT((rcdp.theta() - rcdb.theta()).norm(), 1e-9) << t;
  }
}

TEST(Estimator, Validation) {
  EstimatorConfig c;
  c.dim = 0;
  EXPECT_THROW(EstimatorState{c}, std::invalid_argument);
  EXPECT_EQ(parse_mle_mode("newton"), MleMode::BatchNewton);
  EXPECT_THROW(parse_mle_mode("sgd"), std::invalid_argument);
  EXPECT_GT(elliptic_potential_bound(10, 2000, 0.2, 1.0), 0.0);
}
