#include <gtest/gtest.h>

#include "rcdp/linalg.hpp"
#include "rcdp/rng.hpp"

using namespace rcdp;

namespace {

// Plain Gauss-Jordan inverse with partial pivoting, independent of Eigen's solvers.
Matrix gauss_jordan_inverse(Matrix a) {
  const Eigen::Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    }
    a.row(c).swap(a.row(p));
    inv.row(c).swap(inv.row(p));
    const double piv = a(c, c);
    a.row(c) /= piv;
    inv.row(c) /= piv;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

Vector random_vector(int d, CounterRng& rng, double s = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = s * rng.normal();
  return v;
}

}  // namespace

TEST(SpdMatrix, DiagonalUpdate) {
  SpdMatrixd m(2, 1.0);
  m.rank1_update(Vector::Unit(2, 0), 1.0);
  EXPECT_NEAR(m.mat()(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(m.mat()(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(m.inv()(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(m.inv()(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(m.inv()(0, 1), 0.0, 1e-15);
}

TEST(SpdMatrix, ZeroCoefficientIsNoOp) {
  SpdMatrixd m(3, 2.0);
  m.rank1_update(Vector::Constant(3, 5.0), 0.0);
  EXPECT_EQ(m.mat(), Matrix::Identity(3, 3) * 2.0);
  EXPECT_EQ(m.updates(), 0u);
}

TEST(SpdMatrix, MatchesGaussJordanOracle) {
  SpdMatrixd m(3, 1.0);
  const Vector v = Vector::Ones(3);
  m.rank1_update(v, 0.5);
  const Matrix direct = gauss_jordan_inverse(Matrix::Identity(3, 3) + 0.5 * v * v.transpose());
  EXPECT_LT(max_abs(m.inv() - direct), 1e-10);
}

TEST(SpdMatrix, LongRandomSequencesStayAccurate) {
  for (int d : {1, 5, 12, 20}) {
    CounterRng rng(d, Stream::Instance);
    SpdMatrixd m(d, 1.0);
    for (int i = 0; i < 1000; ++i) m.rank1_update(random_vector(d, rng, 0.5), rng.uniform(0.0, 1.0));
    EXPECT_LT(max_abs(m.inv() - gauss_jordan_inverse(m.mat())), 1e-8) << "d=" << d;
  }
}

TEST(SpdMatrix, RejectsBadInput) {
  SpdMatrixd m(2, 1.0);
  EXPECT_THROW(m.rank1_update(Vector::Ones(3), 1.0), LinalgError);
  EXPECT_THROW(m.rank1_update(Vector::Ones(2), -1.0), LinalgError);
  Vector bad = Vector::Ones(2);
  bad(1) = std::nan("");
  EXPECT_THROW(m.rank1_update(bad, 1.0), LinalgError);
  EXPECT_THROW(SpdMatrixd(2, 0.0), LinalgError);
}

TEST(SpdMatrix, FloatInstantiation) {
  SpdMatrix<float> m(2, 1.0f);
  Eigen::VectorXf v(2);
  v << 1.0f, 2.0f;
  m.rank1_update(v, 1.0f);
  EXPECT_NEAR((m.mat() * m.inv() - Eigen::MatrixXf::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0f, 1e-5f);
}

TEST(Mahalanobis, Examples) {
  SpdMatrixd id(4, 1.0);
  EXPECT_DOUBLE_EQ(mahalanobis_inv(id, Vector::Unit(4, 0)), 1.0);
  EXPECT_DOUBLE_EQ(mahalanobis_inv(id, Vector::Zero(4)), 0.0);

  SpdMatrixd m(2, 1.0);
  m.rank1_update(Vector::Unit(2, 0), 3.0);  // diag(4, 1)
  Vector v(2);
  v << 2.0, 3.0;
  EXPECT_NEAR(mahalanobis_inv(m, v), std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(mahalanobis(m, v), std::sqrt(16.0 + 9.0), 1e-12);
}

TEST(Mahalanobis, TriangleInequalityAndMonotonicity) {
  CounterRng rng(7, Stream::Instance);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 8;
    SpdMatrixd m(d, 0.5);
    for (int i = 0; i < 5; ++i) m.rank1_update(random_vector(d, rng), rng.uniform());
    const Vector a = random_vector(d, rng), b = random_vector(d, rng);
    EXPECT_LE(mahalanobis_inv(m, Vector(a + b)), mahalanobis_inv(m, a) + mahalanobis_inv(m, b) + 1e-12);
    const double before = mahalanobis_inv(m, a);
    m.rank1_update(random_vector(d, rng), rng.uniform(0.01, 2.0));
    EXPECT_LE(mahalanobis_inv(m, a), before + 1e-12);
  }
}

TEST(SpdMatrix, ResyncKeepsSymmetry) {
  CounterRng rng(3, Stream::Instance);
  SpdMatrixd m(6, 1.0);
  for (std::size_t i = 0; i < SpdMatrixd::kResyncInterval + 3; ++i) m.rank1_update(random_vector(6, rng), 1.0);
  EXPECT_LT(max_abs(m.inv() - m.inv().transpose()), 1e-14);
  EXPECT_LT(max_abs(m.mat() * m.inv() - Matrix::Identity(6, 6)), 1e-8);
}
