#include "scc/dict.hpp"

#include "scc/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace scc {
namespace {

using testing::dense_projected_step;
using testing::random_unit_columns;

SparseCode random_sparse(Index m, Index k, Rng& rng) {
  auto support = rng.sample_without_replacement(static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(k));
  std::sort(support.begin(), support.end());
  std::vector<SparseCode::Entry> entries;
  for (auto j : support) entries.push_back({j, rng.normal()});
  return SparseCode(m, std::move(entries));
}

TEST(ProjectUnitBall, RadialProjection) {
  Vector d(2);
  d << 2.0 * 0.6, 2.0 * 0.8;
  const Vector p = project_unit_ball(d);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);

  Vector inner(2);
  inner << 0.3, 0.4;
  EXPECT_EQ(project_unit_ball(inner), inner);
  EXPECT_EQ(project_unit_ball(Vector::Zero(3)), Vector::Zero(3));
}

TEST(ProjectUnitBall, NormNeverExceedsOne) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector d = testing::random_vector(1 + static_cast<Index>(rng.below(30)), rng, 10.0 * rng.uniform01());
    EXPECT_LE(project_unit_ball(d).norm(), 1.0 + kUnitBallSlack);
  }
}

TEST(HessianAccumulate, Examples) {
  const SparseCode z(3, {{0, 0.4}, {2, 0.3}});
  HessianDiag H = hessian_accumulate(HessianDiag(3), z);
  EXPECT_NEAR(H.diag()[0], 0.16, 1e-15);
  EXPECT_EQ(H.diag()[1], 0.0);
  EXPECT_NEAR(H.diag()[2], 0.09, 1e-15);
  H = hessian_accumulate(H, z);
  EXPECT_NEAR(H.diag()[0], 0.32, 1e-15);
  EXPECT_NEAR(H.diag()[2], 0.18, 1e-15);
  const Vector before = H.diag();
  H = hessian_accumulate(H, SparseCode(3));
  EXPECT_EQ(H.diag(), before);
  EXPECT_THROW(hessian_accumulate(H, SparseCode(4)), Error);
}

TEST(LearningRate, ReciprocalAndZeroCurvature) {
  const SparseCode z(3, {{0, 0.4}});
  HessianDiag H = hessian_accumulate(HessianDiag(3), z);
  EXPECT_NEAR(learning_rate(H, 0), 6.25, 1e-12);
  H = hessian_accumulate(H, z);
  EXPECT_NEAR(learning_rate(H, 0), 3.125, 1e-12);
  try {
    (void)learning_rate(H, 1);
    FAIL() << "expected ZeroCurvature";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroCurvature);
  }
}

TEST(SgdUpdateSupport, HandArithmetic) {
  Matrix A(2, 1);
  A << 1, 0;
  const Dictionary D(A);
  const SparseCode z(1, {{0, 1.0}});
  Vector x(2);
  x << 0, 1;
  const HessianDiag H = hessian_accumulate(HessianDiag(1), z);
  const Vector residual_neg = z.apply(D.atoms()) - x;
  const Dictionary out = sgd_update_support(D, z, residual_neg, H);
  EXPECT_NEAR(out.atoms()(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(out.atoms()(1, 0), 1.0, 1e-15);
}

TEST(SgdUpdateSupport, EmptyCodeLeavesDictionary) {
  Rng rng(3);
  const Dictionary D(random_unit_columns(4, 6, rng));
  const Dictionary out = sgd_update_support(D, SparseCode(6), Vector::Ones(4), HessianDiag(6));
  EXPECT_EQ(out, D);
}

TEST(SgdUpdateSupport, ZeroCurvatureLeavesDictionaryUntouched) {
  Rng rng(3);
  Dictionary D(random_unit_columns(4, 6, rng));
  const Dictionary before = D;
  const SparseCode z(6, {{1, 0.5}, {4, 0.2}});
  HessianDiag H(6);
  H.accumulate(SparseCode(6, {{1, 0.5}}));
  EXPECT_THROW(sgd_update_support_inplace(D, z, Vector::Ones(4), H), Error);
  EXPECT_EQ(D, before);
}

TEST(SgdUpdateSupport, MatchesDenseOracleAndTouchesOnlySupport) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Dictionary D(random_unit_columns(8, 16, rng));
    const SparseCode z = random_sparse(16, 3, rng);
    const Vector x = testing::random_unit_vector(8, rng);
    HessianDiag H(16);
    for (int warm = 0; warm < static_cast<int>(rng.below(4)); ++warm) H.accumulate(random_sparse(16, 5, rng));
    H.accumulate(z);

    const Vector residual_neg = z.apply(D.atoms()) - x;
    const Dictionary out = sgd_update_support(D, z, residual_neg, H);

    Vector rates = Vector::Zero(16);
    for (Index j = 0; j < 16; ++j) rates[j] = H.diag()[j] > 0 ? 1.0 / H.diag()[j] : 0.0;
    const Matrix expected = dense_projected_step(D.atoms(), z.to_dense(), x, rates);
    EXPECT_LE((out.atoms() - expected).cwiseAbs().maxCoeff(), 1e-12);
    for (Index j = 0; j < 16; ++j) {
      if (z.value(j) == 0.0) EXPECT_TRUE(out.atoms().col(j) == D.atoms().col(j)) << "column " << j;
      EXPECT_LE(out.atoms().col(j).norm(), 1.0 + kUnitBallSlack);
    }
  }
}

TEST(FullGradientStep, ZeroCodesLeaveDictionary) {
  Rng rng(1);
  const Dictionary D(random_unit_columns(4, 6, rng));
  DataSet ds;
  for (int i = 0; i < 5; ++i) ds.samples.push_back({testing::random_unit_vector(4, rng), false});
  const std::vector<SparseCode> codes(5, SparseCode(6));
  EXPECT_EQ(full_gradient_step(D, codes, ds, 0.7), D);
}

TEST(FullGradientStep, SingleSampleMatchesDenseStep) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Dictionary D(random_unit_columns(8, 16, rng));
    const SparseCode z = random_sparse(16, 3, rng);
    const Vector x = testing::random_unit_vector(8, rng);
    DataSet ds{{Sample{x, false}}};
    const Dictionary out = full_gradient_step(D, {z}, ds, 1.0);
    const Matrix expected = dense_projected_step(D.atoms(), z.to_dense(), x, Vector::Ones(16));
    EXPECT_LE((out.atoms() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FullGradientStep, StationaryAtLeastSquaresOptimum) {
  // Planted 4x6 instance: with codes Z fixed, D* = X Z^T (Z Z^T)^{-1} zeroes
  // the gradient. Data are built so D* has unit-ball columns.
  Rng rng(5);
  const Index p = 4, m = 6, n = 12;
  Matrix Z(m, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) Z(j, i) = rng.normal();
  Matrix X(p, n);
  for (Index i = 0; i < n; ++i) X.col(i) = testing::random_vector(p, rng);
  Matrix Dstar = X * Z.transpose() * (Z * Z.transpose()).inverse();
  const double worst = testing::max_column_norm(Dstar);
  Dstar /= 2.0 * worst;
  X /= 2.0 * worst;
  const Dictionary D(Dstar);

  DataSet ds = DataSet::from_matrix(X);
  std::vector<SparseCode> codes;
  for (Index i = 0; i < n; ++i) codes.push_back(SparseCode::from_dense(Z.col(i)));
  const Dictionary out = full_gradient_step(D, codes, ds, 1.0);
  EXPECT_LE((out.atoms() - D.atoms()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FullGradientStep, Errors) {
  Rng rng(1);
  const Dictionary D(random_unit_columns(4, 6, rng));
  DataSet ds{{Sample{testing::random_unit_vector(4, rng), false}}};
  EXPECT_THROW(full_gradient_step(D, {}, ds, 1.0), Error);
  EXPECT_THROW(full_gradient_step(D, {SparseCode(6)}, ds, 0.0), Error);
  EXPECT_THROW(full_gradient_step(D, {SparseCode(5)}, ds, 1.0), Error);
}

TEST(DictProperties, DescentForSmallUniformRate) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Dictionary D(random_unit_columns(8, 16, rng));
    const SparseCode z = random_sparse(16, 1 + static_cast<Index>(rng.below(5)), rng);
    const Vector x = testing::random_unit_vector(8, rng);
    const double eta = rng.uniform01() / z.to_dense().squaredNorm();
    const Vector r0 = z.apply(D.atoms()) - x;
    Dictionary moved = D;
    sgd_update_support_inplace(moved, z, r0, eta);
    const Matrix unprojected = D.atoms() - eta * r0 * z.to_dense().transpose();
    const double before = 0.5 * r0.squaredNorm();
    EXPECT_LE(0.5 * (unprojected * z.to_dense() - x).squaredNorm(), before + 1e-12);
    EXPECT_LE(testing::max_column_norm(moved.atoms()), 1.0 + kUnitBallSlack);
  }
}

}  // namespace
}  // namespace scc
