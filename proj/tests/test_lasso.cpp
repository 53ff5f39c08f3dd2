#include "scc/lasso.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

namespace scc {
namespace {

using testing::dense_lasso_objective;
using testing::enumerate_lasso;
using testing::random_unit_columns;
using testing::random_unit_vector;

Dictionary identity2() { return Dictionary(Matrix::Identity(2, 2)); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

double residual_error(const Dictionary& D, const SparseCode& z, const Vector& x, const Vector& r) {
  return (r - (x - z.apply(D.atoms()))).norm();
}

TEST(SoftThreshold, Branches) {
  EXPECT_NEAR(soft_threshold(0.25, 0.1), 0.15, 1e-15);
  EXPECT_EQ(soft_threshold(-0.05, 0.1), 0.0);
  EXPECT_NEAR(soft_threshold(-0.30, 0.1), -0.20, 1e-15);
  EXPECT_EQ(soft_threshold(0.1, 0.1), 0.0);   // inclusive dead zone
  EXPECT_EQ(soft_threshold(-0.1, 0.1), 0.0);
}

TEST(CdFullCycle, IdentityDictionaryClosedForm) {
  const Dictionary D = identity2();
  const Vector x = vec2(0.5, 0.05);
  CDWorkspace ws(2, 2);
  ws.reset(D, SparseCode(2), x);
  const CDResult first = cd_full_cycle(D, SparseCode(2), x, ws, 0.1);
  ASSERT_EQ(first.code.support_size(), 1u);
  EXPECT_NEAR(first.code.value(0), 0.4, 1e-15);
  EXPECT_EQ(first.code.value(1), 0.0);
  EXPECT_NEAR(first.residual[0], 0.1, 1e-15);
  EXPECT_NEAR(first.residual[1], 0.05, 1e-15);

  const CDResult again = cd_full_cycle(D, first.code, x, ws, 0.1);
  EXPECT_EQ(again.code, first.code);
}

TEST(CdFullCycle, DimensionMismatch) {
  const Dictionary D = identity2();
  CDWorkspace ws(2, 2);
  Vector x(3);
  x.setZero();
  EXPECT_THROW(cd_full_cycle(D, SparseCode(2), x, ws, 0.1), Error);
  EXPECT_THROW(cd_full_cycle(D, SparseCode(3), vec2(0, 0), ws, 0.1), Error);
}

TEST(CdFullCycle, RepeatedCyclesMatchEnumerationAndProx) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Dictionary D(random_unit_columns(3, 4, rng));
    const Vector x = random_unit_vector(3, rng);
    const double lambda = 0.1;
    CDWorkspace ws(3, 4);
    SparseCode z(4);
    ws.reset(D, z, x);
    for (int it = 0; it < 100000; ++it) {
      CDResult r = cd_full_cycle(D, z, x, ws, lambda);
      const double change = (r.code.to_dense() - z.to_dense()).lpNorm<Eigen::Infinity>();
      z = std::move(r.code);
      if (change < 1e-10) break;
    }
    const double f_cd = dense_lasso_objective(D.atoms(), z.to_dense(), x, lambda);
    const double f_exact = dense_lasso_objective(D.atoms(), enumerate_lasso(D.atoms(), x, lambda), x, lambda);
    const SparseCode z_prox = lasso_oracle_prox(D, x, lambda, 1e-12);
    const double f_prox = dense_lasso_objective(D.atoms(), z_prox.to_dense(), x, lambda);
    EXPECT_LE(std::abs(f_cd - f_prox), 1e-8 * f_prox) << "trial " << trial;
    EXPECT_LE(std::abs(f_cd - f_exact), 1e-8 * f_exact) << "trial " << trial;
  }
}

TEST(CdSupportCycle, EmptySupportIsNoOp) {
  Rng rng(1);
  const Dictionary D(random_unit_columns(5, 7, rng));
  const Vector x = random_unit_vector(5, rng);
  CDWorkspace ws(5, 7);
  ws.reset(D, SparseCode(7), x);
  const Vector before = ws.residual;
  const CDResult r = cd_support_cycle(D, SparseCode(7), x, ws, 0.1);
  EXPECT_TRUE(r.code.empty());
  EXPECT_EQ(r.residual, before);
}

TEST(CdSupportCycle, FixedPointOnIdentity) {
  const Dictionary D = identity2();
  const Vector x = vec2(0.5, 0.05);
  const SparseCode z(2, {{0, 0.4}});
  CDWorkspace ws(2, 2);
  ws.reset(D, z, x);
  const CDResult r = cd_support_cycle(D, z, x, ws, 0.1);
  EXPECT_EQ(r.code.support_size(), 1u);
  EXPECT_NEAR(r.code.value(0), 0.4, 1e-15);
}

TEST(CdSupportCycle, DeadZoneCoordinateLeavesSupport) {
  // Columns d0 = e0, d1 at 80 degrees from d0 in the (e0, e1) plane, d2, d3
  // off-plane. x = d0, so the lasso optimum is (0.9, 0, 0, 0).
  Matrix A(3, 4);
  const double c = std::cos(80.0 * M_PI / 180.0);
  const double s = std::sin(80.0 * M_PI / 180.0);
  A << 1, c, 0, 0.6,
       0, s, 0.6, 0,
       0, 0, 0.8, 0.8;
  const Dictionary D(A);
  const Vector x = A.col(0);
  const double lambda = 0.1;

  const Vector exact = enumerate_lasso(A, x, lambda);
  ASSERT_EQ(exact[1], 0.0);
  ASSERT_NEAR(exact[0], 0.9, 1e-12);

  const SparseCode z_init(4, {{0, 0.9}, {1, 0.05}});
  CDWorkspace ws(3, 4);
  ws.reset(D, z_init, x);
  const CDResult r = cd_support_cycle(D, z_init, x, ws, lambda);
  EXPECT_LT(r.code.support_size(), z_init.support_size());
  EXPECT_EQ(r.code.value(1), 0.0);
  EXPECT_LE(residual_error(D, r.code, x, r.residual), 1e-12);
}

TEST(EncodeScc, SingleStepEqualsOneFullCycle) {
  Rng rng(77);
  const Dictionary D(random_unit_columns(8, 16, rng));
  const Vector x = random_unit_vector(8, rng);
  CDWorkspace ws(8, 16);
  ws.reset(D, SparseCode(16), x);
  const CDResult full = cd_full_cycle(D, SparseCode(16), x, ws, 0.1);
  const CDResult enc = encode_scc(D, SparseCode(16), x, 0.1, 1);
  EXPECT_EQ(enc.code, full.code);
  EXPECT_EQ(enc.residual, full.residual);
  EXPECT_EQ(enc.cycles_run, 1);
}

TEST(EncodeScc, IdentityReachesOptimum) {
  const CDResult r = encode_scc(identity2(), SparseCode(2), vec2(0.5, 0.05), 0.1, 3);
  EXPECT_EQ(r.cycles_run, 3);
  ASSERT_EQ(r.code.support_size(), 1u);
  EXPECT_NEAR(r.code.value(0), 0.4, 1e-15);
}

TEST(EncodeScc, ObjectiveNonincreasingInSteps) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Dictionary D(random_unit_columns(8, 16, rng));
    const Vector x = random_unit_vector(8, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (int S : {1, 3, 5, 7, 9}) {
      const CDResult r = encode_scc(D, SparseCode(16), x, 0.1, S);
      const double f = dense_lasso_objective(D.atoms(), r.code.to_dense(), x, 0.1);
      EXPECT_LE(f, prev + 1e-12) << "S=" << S;
      prev = f;
    }
  }
}

TEST(EncodeScc, RejectsBadSteps) {
  EXPECT_THROW(encode_scc(identity2(), SparseCode(2), vec2(1, 0), 0.1, 0), Error);
  EXPECT_THROW(encode_scc(identity2(), SparseCode(2), vec2(1, 0), 0.1, 2, 3), Error);
}

TEST(LassoOracleCd, IdentityExact) {
  const SparseCode z = lasso_oracle_cd(identity2(), vec2(0.5, 0.05), 0.1, 1e-12);
  ASSERT_EQ(z.support_size(), 1u);
  EXPECT_NEAR(z.value(0), 0.4, 1e-15);
}

TEST(LassoOracleCd, FullShrinkageGivesZero) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Dictionary D(random_unit_columns(6, 10, rng));
    const Vector x = random_unit_vector(6, rng);
    const double lambda = (D.atoms().transpose() * x).cwiseAbs().maxCoeff() * (1.0 + rng.uniform01());
    EXPECT_TRUE(lasso_oracle_cd(D, x, lambda, 1e-12).empty());
  }
}

TEST(LassoOracleCd, AgreesWithProxOnRandomInstances) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Dictionary D(random_unit_columns(8, 16, rng));
    const Vector x = random_unit_vector(8, rng);
    const double f_cd = dense_lasso_objective(D.atoms(), lasso_oracle_cd(D, x, 0.1, 1e-12).to_dense(), x, 0.1);
    const double f_px = dense_lasso_objective(D.atoms(), lasso_oracle_prox(D, x, 0.1, 1e-12).to_dense(), x, 0.1);
    EXPECT_LE(std::abs(f_cd - f_px), 1e-8 * std::max(f_cd, f_px));
  }
}

TEST(LassoOracleProx, IdentityAndZeroDatum) {
  const SparseCode z = lasso_oracle_prox(identity2(), vec2(0.5, 0.05), 0.1, 1e-12);
  EXPECT_NEAR(z.value(0), 0.4, 1e-10);
  EXPECT_EQ(z.value(1), 0.0);
  EXPECT_TRUE(lasso_oracle_prox(identity2(), vec2(0, 0), 0.1, 1e-12).empty());
}

TEST(LassoOracles, RejectNonpositiveTolerance) {
  EXPECT_THROW(lasso_oracle_cd(identity2(), vec2(1, 0), 0.1, 0.0), Error);
  EXPECT_THROW(lasso_oracle_prox(identity2(), vec2(1, 0), 0.1, -1.0), Error);
}

TEST(LargestGramEigenvalue, MatchesSelfAdjointSolver) {
  Rng rng(6);
  const Matrix D = random_unit_columns(8, 16, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(D.transpose() * D);
  EXPECT_NEAR(largest_gram_eigenvalue(D), es.eigenvalues().maxCoeff(), 1e-9);
}

// Property suite over random instances: monotone objective per cycle,
// residual consistency, support containment, idempotence at the optimum.
TEST(LassoProperties, CyclesDescendAndKeepResidual) {
  Rng rng(31337);
  for (int trial = 0; trial < 150; ++trial) {
    const Index p = 2 + static_cast<Index>(rng.below(10));
    const Index m = 1 + static_cast<Index>(rng.below(20));
    const Dictionary D(random_unit_columns(p, m, rng));
    const Vector x = testing::random_vector(p, rng);
    const double lambda = 0.01 + 0.5 * rng.uniform01();
    CDWorkspace ws(p, m);
    Vector dense = Vector::Zero(m);
    for (Index j = 0; j < m; ++j)
      if (rng.uniform01() < 0.3) dense[j] = rng.normal();
    SparseCode z = SparseCode::from_dense(dense);
    ws.reset(D, z, x);
    for (int cycle = 0; cycle < 6; ++cycle) {
      const double before = dense_lasso_objective(D.atoms(), z.to_dense(), x, lambda);
      const bool support_only = cycle % 2 == 1;
      CDResult r = support_only ? cd_support_cycle(D, z, x, ws, lambda) : cd_full_cycle(D, z, x, ws, lambda);
      const double after = dense_lasso_objective(D.atoms(), r.code.to_dense(), x, lambda);
      EXPECT_LE(after, before + 1e-12);
      EXPECT_LE(residual_error(D, r.code, x, ws.residual), 1e-8 * (1.0 + x.norm()));
      if (support_only) {
        for (auto j : r.code.support()) EXPECT_NE(z.value(j), 0.0);
      }
      z = std::move(r.code);
    }

    const double tol = 1e-12;
    const SparseCode opt = lasso_oracle_cd(D, x, lambda, tol);
    ws.reset(D, opt, x);
    const CDResult again = cd_full_cycle(D, opt, x, ws, lambda);
    EXPECT_LE((again.code.to_dense() - opt.to_dense()).lpNorm<Eigen::Infinity>(), 10 * tol);
  }
}

TEST(LassoProperties, CyclesDescendWithShrunkenAtoms) {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix A = random_unit_columns(6, 9, rng);
    for (Index j = 0; j < A.cols(); ++j) A.col(j) *= 0.2 + 0.8 * rng.uniform01();
    const Dictionary D(A);
    const Vector x = testing::random_vector(6, rng);
    SparseCode z(9);
    CDWorkspace ws(6, 9);
    ws.reset(D, z, x);
    for (int cycle = 0; cycle < 5; ++cycle) {
      const double before = dense_lasso_objective(A, z.to_dense(), x, 0.1);
      CDResult r = cd_full_cycle(D, z, x, ws, 0.1);
      EXPECT_LE(dense_lasso_objective(A, r.code.to_dense(), x, 0.1), before + 1e-12);
      z = std::move(r.code);
    }
  }
}

}  // namespace
}  // namespace scc
