//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/ssl.h"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.h"

namespace pepview {
namespace {
// Row-wise plus column-wise cross entropy written out with explicit sums.
double infonce_oracle(const Matrix &hx, const Matrix &hy, double tau) {
  const auto b = hx.rows();
  double total = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    double row = 0, col = 0;
    for (Eigen::Index j = 0; j < b; ++j) {
      row += std::exp(hx.row(i).dot(hy.row(j)) / tau);
      col += std::exp(hx.row(j).dot(hy.row(i)) / tau);
    }
    const double pos = hx.row(i).dot(hy.row(i)) / tau;
    total += (std::log(row) - pos) + (std::log(col) - pos);
  }
  return 0.5 * total / static_cast<double>(b);
}

TEST(Score, Examples) {
  const std::vector<double> a { 1, 0 }, b { 1, 2 }, c { 3, 4 };
  EXPECT_EQ(score(a, a), 1.0);
  EXPECT_EQ(score(b, c), 11.0);
  EXPECT_EQ(score(b, c), score(c, b));
  EXPECT_THROW(score(a, std::vector<double> { 1 }), ConfigError);
}

TEST(InfoNce, Examples) {
  EXPECT_EQ(infonce_loss(Matrix::Ones(1, 3), Matrix::Ones(1, 3)).loss, 0.0);
  EXPECT_NEAR(infonce_loss(Matrix::Zero(2, 2), Matrix::Zero(2, 2)).loss,
              std::log(2.0), 1e-15);
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_NEAR(infonce_loss(eye, eye, 1.0).loss, std::log(1 + std::exp(-1.0)),
              1e-15);
}

TEST(InfoNce, MatchesOracleAndIsNonNegative) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const int b = 1 + static_cast<int>(rng.below(8));
    const int d = 1 + static_cast<int>(rng.below(16));
    const Matrix hx = test::random_matrix(b, d, rng);
    const Matrix hy = test::random_matrix(b, d, rng);
    const double tau = rng.uniform(0.2, 3);
    const double loss = infonce_loss(hx, hy, tau).loss;
    EXPECT_GE(loss, 0);
    EXPECT_NEAR(loss, infonce_oracle(hx, hy, tau), 1e-10);
  }
}

TEST(InfoNce, OrthogonalInvariance) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const int b = 2 + static_cast<int>(rng.below(7));
    const int d = 1 + static_cast<int>(rng.below(10));
    const Matrix hx = test::random_matrix(b, d, rng);
    const Matrix hy = test::random_matrix(b, d, rng);
    const Eigen::HouseholderQR<Matrix> qr(test::random_matrix(d, d, rng));
    const Matrix q = qr.householderQ();
    EXPECT_NEAR(infonce_loss(hx, hy).loss,
                infonce_loss(hx * q, hy * q).loss, 1e-8);
  }
}

TEST(InfoNce, RejectsNonFinite) {
  Matrix hx = Matrix::Zero(2, 2);
  hx(0, 0) = INFINITY;
  EXPECT_THROW(infonce_loss(hx, Matrix::Zero(2, 2)), NumericError);
}

TEST(Kl, Examples) {
  const std::vector<double> zero { 0 }, one { 1 }, ln4 { std::log(4.0) };
  EXPECT_EQ(kl_diag_gaussian(zero, zero), 0.0);
  EXPECT_EQ(kl_diag_gaussian(one, zero), 0.5);
  EXPECT_NEAR(kl_diag_gaussian(zero, ln4), 0.5 * (4 - 1 - std::log(4.0)),
              1e-15);
  EXPECT_NEAR(kl_diag_gaussian(zero, ln4), 0.8069, 1e-4);
}

// Heads with identity decoders and zero variational heads, so z = noise.
VrrHeads degenerate_heads(int dim, double beta) {
  Rng rng(0);
  VrrHeads heads(dim, { dim, beta, 1 }, rng);
  for (Linear *l: { &heads.mu_x, &heads.logvar_x, &heads.mu_y,
                    &heads.logvar_y }) {
    l->weight.value.setZero();
    l->bias.value.setZero();
  }
  for (Linear *l: { &heads.decoder_x, &heads.decoder_y }) {
    l->weight.value.setIdentity();
    l->bias.value.setZero();
  }
  return heads;
}

TEST(Vrr, KlOnlyExample) {
  VrrHeads heads = degenerate_heads(1, 2.0);
  heads.mu_x.bias.value(0, 0) = 1;
  // Decoders ignore z; targets equal the constant outputs.
  heads.decoder_x.weight.value.setZero();
  heads.decoder_y.weight.value.setZero();
  Rng rng(3);
  const Matrix zero = Matrix::Zero(1, 1);
  const VrrResult res = vrr_loss_with_targets(zero, zero, zero, zero, heads, rng);
  EXPECT_EQ(res.reconstruction, 0.0);
  EXPECT_NEAR(res.loss, 0.5, 1e-15);
}

TEST(Vrr, PerfectReconstructionIsZero) {
  VrrHeads heads = degenerate_heads(3, 1.0);
  heads.decoder_x.weight.value.setZero();
  heads.decoder_y.weight.value.setZero();
  Rng rng(4);
  const Matrix h = Matrix::Zero(4, 3);
  EXPECT_EQ(vrr_loss(h, h, heads, rng).loss, 0.0);
}

TEST(Vrr, StopGradientOnTargets) {
  // The x term reconstructs h_y; with the y view's heads zeroed, h_y can
  // only receive gradient through the reconstruction target, which must not
  // happen.
  Rng init(5);
  VrrHeads heads(4, {}, init);
  heads.mu_y.weight.value.setZero();
  heads.logvar_y.weight.value.setZero();
  Rng rng(6);
  const VrrResult res = vrr_loss(test::random_matrix(3, 4, init),
                                 test::random_matrix(3, 4, init), heads, rng);
  EXPECT_EQ(res.d_hy.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(res.d_hx.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Vrr, BitReproducible) {
  Rng init(7);
  VrrHeads a(5, { 3, 1.0, 2 }, init);
  VrrHeads b = a;
  const Matrix hx = test::random_matrix(4, 5, init);
  const Matrix hy = test::random_matrix(4, 5, init);
  Rng ra(11), rb(11);
  const VrrResult x = vrr_loss(hx, hy, a, ra);
  const VrrResult y = vrr_loss(hx, hy, b, rb);
  EXPECT_EQ(x.loss, y.loss);
  EXPECT_EQ(x.d_hx, y.d_hx);
  EXPECT_EQ(a.mu_x.weight.grad, b.mu_x.weight.grad);
}

TEST(Vrr, RejectsNegativeBeta) {
  Rng rng(1);
  EXPECT_THROW(VrrHeads(4, { 2, -1.0, 1 }, rng), ConfigError);
}

TEST(Matching, Examples) {
  const Matrix eye = Matrix::Identity(4, 4);
  EXPECT_EQ(matching_accuracy(eye, eye).mean, 1.0);
  const Matrix reversed = eye.colwise().reverse();
  EXPECT_EQ(matching_accuracy(eye, reversed).mean, 0.0);
  const MatchingAccuracy tied =
      matching_accuracy(Matrix::Ones(4, 2), Matrix::Ones(4, 2));
  EXPECT_EQ(tied.x_to_y, 0.25);
  EXPECT_EQ(tied.mean, 0.25);
}

TEST(Matching, DiagonallyDominant) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const int b = 1 + static_cast<int>(rng.below(10));
    Matrix s = test::random_matrix(b, b, rng);
    for (int i = 0; i < b; ++i)
      s(i, i) = s.row(i).cwiseAbs().sum() + s.col(i).cwiseAbs().sum() + 1;
    // h_x = S, h_y = I gives score matrix S.
    EXPECT_EQ(matching_accuracy(s, Matrix::Identity(b, b)).mean, 1.0);
  }
}

TEST(LossKind, Parse) {
  EXPECT_EQ(parse_loss_kind("infonce"), LossKind::kContrastive);
  EXPECT_EQ(parse_loss_kind("vae"), LossKind::kGenerative);
  EXPECT_EQ(parse_loss_kind("both"), LossKind::kBoth);
  EXPECT_THROW(parse_loss_kind("mlm"), ConfigError);
  EXPECT_THROW((SslConfig { LossKind::kContrastive, 0.0, 1.0 }.validate()),
               ConfigError);
}
}  // namespace
}  // namespace pepview
