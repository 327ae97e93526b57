//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/nn.h"

#include <cmath>

#include <gtest/gtest.h>

#include "pepview/gradcheck.h"
#include "test_util.h"

namespace pepview {
namespace {
Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto &row: rows) {
    Eigen::Index j = 0;
    for (double v: row)
      m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(Linear, Forward) {
  EXPECT_EQ(linear_forward(mat({ { 1, 2 } }), mat({ { 1, 0 }, { 0, 1 } }),
                           mat({ { 0, 0 } })),
            mat({ { 1, 2 } }));
  EXPECT_EQ(linear_forward(mat({ { 1, 1 } }), mat({ { 2, 3 }, { 4, 5 } }),
                           mat({ { 1, 1 } })),
            mat({ { 7, 9 } }));
}

TEST(Linear, ShapeMismatchNamesShapes) {
  try {
    linear_forward(mat({ { 1, 2, 3 } }), mat({ { 1 }, { 2 } }), mat({ { 0 } }));
    FAIL();
  } catch (const ConfigError &e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("1x3"), std::string::npos) << what;
    EXPECT_NE(what.find("2x1"), std::string::npos) << what;
  }
}

TEST(Linear, GradcheckRandom3x4) {
  Rng rng(1);
  Parameter x(test::random_matrix(3, 4, rng));
  Linear layer(4, 2, rng);
  const Matrix w = test::random_matrix(3, 2, rng);
  std::vector<NamedParameter> params { { "x", &x } };
  layer.collect("l", params);
  const double err = check_gradients(
      params, [&] { return (layer.forward(x.value).array() * w.array()).sum(); },
      [&] { x.grad += layer.backward(x.value, w); });
  EXPECT_LT(err, 1e-6);
}

TEST(Relu, ForwardBackward) {
  const Matrix x = mat({ { -1, 0, 2 } });
  EXPECT_EQ(relu_forward(x), mat({ { 0, 0, 2 } }));
  EXPECT_EQ(relu_backward(x, mat({ { 1, 1, 1 } })), mat({ { 0, 0, 1 } }));
}

TEST(Relu, GradcheckAwayFromZero) {
  Parameter x(mat({ { -1.3, 0.4, 2.0 }, { 0.7, -0.2, -3.1 } }));
  const Matrix w = mat({ { 0.5, -1, 2 }, { 1, 1, -0.5 } });
  std::vector<NamedParameter> params { { "x", &x } };
  const double err = check_gradients(
      params, [&] { return (relu_forward(x.value).array() * w.array()).sum(); },
      [&] { x.grad += relu_backward(x.value, w); });
  EXPECT_LT(err, 1e-6);
}

TEST(BatchNorm, EvalIdentity) {
  BatchNorm bn(3);
  Rng rng(2);
  const Matrix x = test::random_matrix(4, 3, rng);
  EXPECT_LT((bn.forward(x, Mode::kEval) - x).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(BatchNorm, TrainTwoRows) {
  BatchNorm bn(1);
  const Matrix y = bn.forward(mat({ { 0 }, { 2 } }), Mode::kTrain);
  EXPECT_NEAR(y(0, 0), -1, 1e-5);
  EXPECT_NEAR(y(1, 0), 1, 1e-5);
}

TEST(BatchNorm, SingleRowTrainFails) {
  BatchNorm bn(2);
  EXPECT_THROW(bn.forward(mat({ { 1, 2 } }), Mode::kTrain), ConfigError);
}

TEST(BatchNorm, RunningStatistics) {
  BatchNorm bn(1);
  bn.forward(mat({ { 0 }, { 2 } }), Mode::kTrain);
  EXPECT_NEAR(bn.running_mean(0, 0), 0.1, 1e-15);
  // Unbiased batch variance 2, momentum 0.1.
  EXPECT_NEAR(bn.running_var(0, 0), 0.9 + 0.2, 1e-15);
}

TEST(BatchNorm, NormalizedMoments) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const int b = 2 + static_cast<int>(rng.below(30));
    const int d = 1 + static_cast<int>(rng.below(6));
    BatchNorm bn(d);
    const Matrix x = test::random_matrix(b, d, rng, rng.uniform(0.5, 5));
    const Matrix y = bn.forward(x, Mode::kTrain);
    for (int j = 0; j < d; ++j) {
      const double x_var =
          (x.col(j).array() - x.col(j).mean()).square().mean();
      const double mean = y.col(j).mean();
      const double var = (y.col(j).array() - mean).square().mean();
      EXPECT_LT(std::abs(mean), 1e-12);
      EXPECT_NEAR(var, x_var / (x_var + bn.eps), 1e-12);
    }
  }
}

TEST(SoftmaxCrossEntropy, Examples) {
  const int zero = 0;
  EXPECT_NEAR(softmax_cross_entropy(mat({ { 0.3, 0.3 } }), { &zero, 1 }).loss,
              std::log(2.0), 1e-12);
  const CrossEntropy ce = softmax_cross_entropy(mat({ { 1, 0 } }), { &zero, 1 });
  EXPECT_NEAR(ce.loss, std::log(1 + std::exp(-1.0)), 1e-12);
  EXPECT_NEAR(ce.loss, 0.3133, 1e-4);
}

TEST(SoftmaxCrossEntropy, GradientRowsSumToZero) {
  Rng rng(4);
  const Matrix s = test::random_matrix(5, 4, rng, 3);
  const std::vector<int> targets { 0, 3, 1, 1, 2 };
  const CrossEntropy ce = softmax_cross_entropy(s, targets);
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    EXPECT_NEAR(ce.dscores.row(i).sum(), 0, 1e-15);
}

TEST(SoftmaxCrossEntropy, RejectsNonFinite) {
  const int zero = 0;
  EXPECT_THROW(softmax_cross_entropy(mat({ { NAN, 0 } }), { &zero, 1 }),
               NumericError);
}

TEST(FiniteDiff, Quadratic) {
  const std::vector<double> w { 3 }, grad { 6 };
  auto f = [](std::span<const double> t) { return t[0] * t[0]; };
  EXPECT_LT(finite_diff_check(f, w, grad), 1e-6);
}

TEST(FiniteDiff, Sine) {
  const std::vector<double> w { 1 }, grad { std::cos(1.0) };
  auto f = [](std::span<const double> t) { return std::sin(t[0]); };
  EXPECT_LT(finite_diff_check(f, w, grad), 1e-6);
  EXPECT_NEAR(grad[0], 0.5403, 1e-4);
}

TEST(FiniteDiff, ReportsWrongGradient) {
  const std::vector<double> w { 3 }, grad { 5 };
  auto f = [](std::span<const double> t) { return t[0] * t[0]; };
  EXPECT_GT(finite_diff_check(f, w, grad), 0.05);
}

TEST(FiniteDiff, RejectsNondeterministic) {
  int calls = 0;
  auto f = [&](std::span<const double> t) { return t[0] + calls++; };
  const std::vector<double> w { 1 }, grad { 1 };
  EXPECT_THROW(finite_diff_check(f, w, grad), NumericError);
}

TEST(FiniteDiff, LinearReluSum) {
  Rng rng(9);
  Parameter x(test::random_matrix(4, 5, rng));
  Linear layer(5, 3, rng);
  std::vector<NamedParameter> params { { "x", &x } };
  layer.collect("l", params);
  Matrix pre;
  const double err = check_gradients(
      params,
      [&] {
        pre = layer.forward(x.value);
        return relu_forward(pre).sum();
      },
      [&] {
        const Matrix ones = Matrix::Ones(pre.rows(), pre.cols());
        x.grad += layer.backward(x.value, relu_backward(pre, ones));
      });
  EXPECT_LT(err, 1e-5);
}

TEST(Rng, Reproducible) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
  Rng c(42);
  c.normal();
  const std::string state = c.state();
  const double next = c.normal();
  Rng d(0);
  d.restore(state);
  EXPECT_EQ(d.normal(), next);
}

TEST(Rng, BelowIsInRange) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i)
    EXPECT_LT(rng.below(7), 7);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}
}  // namespace
}  // namespace pepview
