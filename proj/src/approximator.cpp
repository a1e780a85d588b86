#include "rcdp/approximator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcdp {

std::string_view to_string(ApproximatorType a) {
  switch (a) {
    case ApproximatorType::Ridge: return "ridge";
    case ApproximatorType::FourierRidge: return "fourier_ridge";
    case ApproximatorType::Mlp: return "mlp";
  }
  return "?";
}

ApproximatorType parse_approximator(std::string_view s) {
  if (s == "ridge") return ApproximatorType::Ridge;
  if (s == "fourier_ridge") return ApproximatorType::FourierRidge;
  if (s == "mlp") return ApproximatorType::Mlp;
  throw std::invalid_argument("unknown approximator: " + std::string(s));
}

std::unique_ptr<Approximator> make_approximator(const ApproximatorKind& kind, int dx, int dy) {
  if (kind.type == ApproximatorType::Mlp) return std::make_unique<MlpApproximator>(kind, dx, dy);
  return std::make_unique<RidgeApproximator>(kind, dx, dy);
}

// ---------------------------------------------------------------------------
// Ridge / FourierRidge

RidgeApproximator::RidgeApproximator(const ApproximatorKind& kind, int dx, int dy)
    : Approximator(dx, dy), kind_(kind) {
  if (!(kind.ridge_lambda > 0.0)) throw std::invalid_argument("ridge_lambda must be > 0");
  int p = dx;
  if (kind.type == ApproximatorType::FourierRidge) {
    if (kind.num_features < dx) throw std::invalid_argument("num_features must be >= dx");
    if (!(kind.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    CounterRng rng(kind.seed, Stream::Approximator);
    omega_.resize(kind.num_features, dx);
    phase_.resize(kind.num_features);
    for (Eigen::Index i = 0; i < omega_.size(); ++i) omega_.data()[i] = rng.normal() / kind.bandwidth;
    for (Eigen::Index i = 0; i < phase_.size(); ++i) phase_(i) = rng.uniform(0.0, 2.0 * M_PI);
    p += kind.num_features;
  }
  gram_ = SpdMatrixd(p, kind.ridge_lambda);
  cross_ = Matrix::Zero(p, dy);
  weights_ = Matrix::Zero(p, dy);
}

Vector RidgeApproximator::features(const Vector& x) const {
  const Vector xs = kind_.input_scale * x;
  if (kind_.type != ApproximatorType::FourierRidge) return xs;
  Vector f(feature_dim());
  f.head(dx_) = xs;
  const double amp = std::sqrt(2.0 / double(kind_.num_features));
  f.tail(kind_.num_features) = amp * ((omega_ * xs + phase_).array().cos()).matrix();
  return f;
}

void RidgeApproximator::fit_step(const ReplayBuffer& buf) {
  if (buf.empty()) return;
  for (; consumed_ < buf.size(); ++consumed_) {
    const Vector f = features(buf.xs[consumed_]);
    gram_.rank1_update(f, 1.0);
    cross_.noalias() += f * buf.ys[consumed_].transpose();
  }
  weights_.noalias() = gram_.inv() * cross_;
  trained_ = true;
}

Vector RidgeApproximator::predict(const Vector& x) const {
  if (!trained_) return Vector::Zero(dy_);
  return weights_.transpose() * features(x);
}

// ---------------------------------------------------------------------------
// MLP

namespace {
Matrix he_init(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Matrix m(rows, cols);
  const double bound = std::sqrt(6.0 / double(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}
}  // namespace

MlpApproximator::MlpApproximator(const ApproximatorKind& kind, int dx, int dy)
    : Approximator(dx, dy), kind_(kind) {
  if (!(kind.lr > 0.0)) throw std::invalid_argument("mlp lr must be > 0");
  CounterRng rng(kind.seed, Stream::Approximator);
  w1_ = he_init(kind.hidden1, dx, rng);
  w2_ = he_init(kind.hidden2, kind.hidden1, rng);
  w3_ = he_init(dy, kind.hidden2, rng);
  b1_ = Matrix::Zero(kind.hidden1, 1);
  b2_ = Matrix::Zero(kind.hidden2, 1);
  b3_ = Matrix::Zero(dy, 1);
  aw1_.init(w1_.rows(), w1_.cols());
  aw2_.init(w2_.rows(), w2_.cols());
  aw3_.init(w3_.rows(), w3_.cols());
  ab1_.init(b1_.rows(), 1);
  ab2_.init(b2_.rows(), 1);
  ab3_.init(b3_.rows(), 1);
}

void MlpApproximator::adam_step(Matrix& param, const Matrix& grad, Adam& st) {
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  st.m = kBeta1 * st.m + (1.0 - kBeta1) * grad;
  st.v = kBeta2 * st.v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(kBeta1, double(step_));
  const double c2 = 1.0 - std::pow(kBeta2, double(step_));
  param.array() -= kind_.lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + kEps);
}

void MlpApproximator::fit_step(const ReplayBuffer& buf) {
  if (buf.empty()) return;
  const Eigen::Index n = static_cast<Eigen::Index>(buf.size());
  Matrix X(dx_, n), Y(dy_, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.col(i) = kind_.input_scale * buf.xs[i];
    Y.col(i) = buf.ys[i];
  }
  for (int e = 0; e < kind_.epochs_per_round; ++e) {
    const Matrix z1 = (w1_ * X).colwise() + b1_.col(0);
    const Matrix h1 = z1.cwiseMax(0.0);
    const Matrix z2 = (w2_ * h1).colwise() + b2_.col(0);
    const Matrix h2 = z2.cwiseMax(0.0);
    const Matrix out = (w3_ * h2).colwise() + b3_.col(0);

    // d/d(out) of mean over samples of ||out - y||^2.
    const Matrix g3 = (2.0 / double(n)) * (out - Y);
    const Matrix gw3 = g3 * h2.transpose();
    const Matrix gb3 = g3.rowwise().sum();
    const Matrix g2 = (w3_.transpose() * g3).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
    const Matrix gw2 = g2 * h1.transpose();
    const Matrix gb2 = g2.rowwise().sum();
    const Matrix g1 = (w2_.transpose() * g2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
    const Matrix gw1 = g1 * X.transpose();
    const Matrix gb1 = g1.rowwise().sum();

    ++step_;
    adam_step(w1_, gw1, aw1_);
    adam_step(w2_, gw2, aw2_);
    adam_step(w3_, gw3, aw3_);
    adam_step(b1_, gb1, ab1_);
    adam_step(b2_, gb2, ab2_);
    adam_step(b3_, gb3, ab3_);
  }
  trained_ = true;
}

Vector MlpApproximator::predict(const Vector& x) const {
  if (!trained_) return Vector::Zero(dy_);
  const Vector xs = kind_.input_scale * x;
  const Vector h1 = (w1_ * xs + b1_.col(0)).cwiseMax(0.0);
  const Vector h2 = (w2_ * h1 + b2_.col(0)).cwiseMax(0.0);
  return w3_ * h2 + b3_.col(0);
}

double MlpApproximator::loss(const ReplayBuffer& buf) const {
  if (buf.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) s += (predict(buf.xs[i]) - buf.ys[i]).squaredNorm();
  return s / double(buf.size());
}

// ---------------------------------------------------------------------------

double sup_error(const Approximator& a, const TruthFn& truth, const std::vector<Vector>& grid) {
  if (grid.empty()) throw std::invalid_argument("sup_error: empty grid");
  double worst = 0.0;
  for (const auto& x : grid) worst = std::max(worst, (a.predict(x) - truth(x)).norm());
  return worst;
}

}  // namespace rcdp
