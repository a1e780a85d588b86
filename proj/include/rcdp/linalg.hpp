#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace rcdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Regularized SPD matrix with an incrementally maintained inverse.
//
// Starts at lambda * I. Every rank1_update adds c * v v^T to the matrix and
// applies the Sherman-Morrison correction to the inverse; every
// kResyncInterval updates the inverse is recomputed from a Cholesky
// factorization so floating-point drift stays bounded.
template <typename Scalar>
class SpdMatrix {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  static constexpr std::size_t kResyncInterval = 500;
  static constexpr Scalar kMinDenominator = Scalar(1e-12);

  SpdMatrix() = default;

  SpdMatrix(Eigen::Index dim, Scalar lambda)
      : mat_(MatrixType::Identity(dim, dim) * lambda),
        inv_(MatrixType::Identity(dim, dim) / lambda) {
    if (dim < 0) throw LinalgError("SpdMatrix: negative dimension");
    if (!(lambda > Scalar(0)) || !std::isfinite(double(lambda))) {
      throw LinalgError("SpdMatrix: lambda must be positive and finite");
    }
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const MatrixType& mat() const { return mat_; }
  const MatrixType& inv() const { return inv_; }
  std::size_t updates() const { return updates_; }

  // mat += c v v^T. Throws on dimension mismatch, non-finite input, c < 0, or
  // a numerically singular Sherman-Morrison denominator.
  template <typename Derived>
  void rank1_update(const Eigen::MatrixBase<Derived>& v, Scalar c) {
    if (v.size() != dim()) {
      throw LinalgError("rank1_update: dimension mismatch (" + std::to_string(v.size()) +
                        " vs " + std::to_string(dim()) + ")");
    }
    if (!std::isfinite(double(c)) || !v.allFinite()) {
      throw LinalgError("rank1_update: non-finite input");
    }
    if (c < Scalar(0)) throw LinalgError("rank1_update: negative coefficient");
    if (c == Scalar(0)) return;

    const VectorType iv = inv_ * v;
    const Scalar denom = Scalar(1) + c * v.dot(iv);
    if (!(denom > kMinDenominator)) {
      throw LinalgError("rank1_update: singular denominator");
    }
    mat_.noalias() += c * v * v.transpose();
    inv_.noalias() -= (c / denom) * iv * iv.transpose();
    ++updates_;
    if (updates_ % kResyncInterval == 0) {
      resync();
    } else {
      inv_ = Scalar(0.5) * (inv_ + inv_.transpose());
    }
  }

  // Recompute the inverse directly from mat.
  void resync() {
    Eigen::LLT<MatrixType> llt(mat_);
    if (llt.info() != Eigen::Success) throw LinalgError("resync: matrix not positive definite");
    inv_ = llt.solve(MatrixType::Identity(dim(), dim()));
    inv_ = Scalar(0.5) * (inv_ + inv_.transpose());
  }

 private:
  MatrixType mat_;
  MatrixType inv_;
  std::size_t updates_ = 0;
};

using SpdMatrixd = SpdMatrix<double>;

// ||v||_{m^{-1}} = sqrt(v^T m^{-1} v).
template <typename Scalar, typename Derived>
Scalar mahalanobis_inv(const SpdMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != m.dim()) throw LinalgError("mahalanobis_inv: dimension mismatch");
  const Scalar q = v.dot(m.inv() * v);
  return q > Scalar(0) ? std::sqrt(q) : Scalar(0);
}

// ||v||_{m} = sqrt(v^T m v).
template <typename Scalar, typename Derived>
Scalar mahalanobis(const SpdMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != m.dim()) throw LinalgError("mahalanobis: dimension mismatch");
  const Scalar q = v.dot(m.mat() * v);
  return q > Scalar(0) ? std::sqrt(q) : Scalar(0);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : double(m.cwiseAbs().maxCoeff());
}

}  // namespace rcdp
