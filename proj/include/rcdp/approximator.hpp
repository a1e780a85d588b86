#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "rcdp/linalg.hpp"
#include "rcdp/rng.hpp"

namespace rcdp {

enum class ApproximatorType { Ridge, FourierRidge, Mlp };

std::string_view to_string(ApproximatorType a);
ApproximatorType parse_approximator(std::string_view s);

struct ApproximatorKind {
  ApproximatorType type = ApproximatorType::FourierRidge;
  double ridge_lambda = 1.0;
  // FourierRidge
  int num_features = 128;
  double bandwidth = 1.0;
  // Mlp
  int hidden1 = 64;
  int hidden2 = 64;
  double lr = 1e-3;
  int epochs_per_round = 2;
  // Raw inputs are multiplied by this before featurization, so a model fed
  // scaled contexts can still work on the original [-pi, pi] range.
  double input_scale = 1.0;
  std::uint64_t seed = 0;
};

// Append-only store of observed (x, y) pairs of played arms.
struct ReplayBuffer {
  std::vector<Vector> xs;
  std::vector<Vector> ys;

  void add(const Vector& x, const Vector& y) {
    xs.push_back(x);
    ys.push_back(y);
  }
  std::size_t size() const { return xs.size(); }
  bool empty() const { return xs.empty(); }
};

// Online learner of the post-serving map x -> y.
class Approximator {
 public:
  virtual ~Approximator() = default;

  // Train on the buffer. Ridge variants absorb only pairs added since the last call.
  virtual void fit_step(const ReplayBuffer& buf) = 0;
  // Zero vector until the first fit_step.
  virtual Vector predict(const Vector& x) const = 0;

  int dx() const { return dx_; }
  int dy() const { return dy_; }
  bool trained() const { return trained_; }

 protected:
  Approximator(int dx, int dy) : dx_(dx), dy_(dy) {}
  int dx_;
  int dy_;
  bool trained_ = false;
};

std::unique_ptr<Approximator> make_approximator(const ApproximatorKind& kind, int dx, int dy);

// Multi-output ridge regression on a (possibly lifted) feature map, with the
// Gram inverse maintained by rank-1 updates.
class RidgeApproximator : public Approximator {
 public:
  RidgeApproximator(const ApproximatorKind& kind, int dx, int dy);

  void fit_step(const ReplayBuffer& buf) override;
  Vector predict(const Vector& x) const override;

  Vector features(const Vector& x) const;
  const Matrix& weights() const { return weights_; }  // p x dy
  int feature_dim() const { return static_cast<int>(gram_.dim()); }

 private:
  ApproximatorKind kind_;
  Matrix omega_;  // num_features x dx random frequencies (FourierRidge only)
  Vector phase_;
  SpdMatrixd gram_;
  Matrix cross_;    // p x dy, sum phi(x) y^T
  Matrix weights_;  // p x dy
  std::size_t consumed_ = 0;
};

// Two-hidden-layer ReLU network trained by full-batch Adam on squared error.
class MlpApproximator : public Approximator {
 public:
  MlpApproximator(const ApproximatorKind& kind, int dx, int dy);

  void fit_step(const ReplayBuffer& buf) override;
  Vector predict(const Vector& x) const override;

  // Mean squared error over the buffer.
  double loss(const ReplayBuffer& buf) const;

 private:
  struct Adam {
    Matrix m, v;
    void init(Eigen::Index r, Eigen::Index c) {
      m = Matrix::Zero(r, c);
      v = Matrix::Zero(r, c);
    }
  };
  void adam_step(Matrix& param, const Matrix& grad, Adam& st);

  ApproximatorKind kind_;
  Matrix w1_, w2_, w3_;
  Matrix b1_, b2_, b3_;  // column vectors
  Adam aw1_, aw2_, aw3_, ab1_, ab2_, ab3_;
  long step_ = 0;
};

using TruthFn = std::function<Vector(const Vector&)>;

// max over grid of ||predict(x) - truth(x)||_2.
double sup_error(const Approximator& a, const TruthFn& truth, const std::vector<Vector>& grid);

}  // namespace rcdp
