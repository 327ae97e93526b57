//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_NN_H_
#define PEPVIEW_NN_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pepview/core.h"

namespace pepview {

// Dense row-major 64-bit tensor. Vectors are stored as 1 x D rows.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

enum class Mode { kTrain, kEval };

/// A learnable tensor and its gradient accumulator; the two always share a
/// shape.
struct Parameter {
  Matrix value;
  Matrix grad;

  Parameter() = default;
  explicit Parameter(Matrix v): value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) { }

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

struct NamedParameter {
  std::string name;
  Parameter *param;
};

// Non-learnable state (running statistics) that still belongs in
// checkpoints.
struct NamedBuffer {
  std::string name;
  Matrix *value;
};

std::string shape_string(const Matrix &m);
void require_finite(const Matrix &m, std::string_view what);

// Glorot-uniform fan_in x fan_out matrix.
Matrix glorot(int fan_in, int fan_out, Rng &rng);

Matrix linear_forward(const Matrix &x, const Matrix &weight,
                      const Matrix &bias);

struct LinearGrads {
  Matrix dx;
  Matrix dweight;
  Matrix dbias;
};

LinearGrads linear_backward(const Matrix &x, const Matrix &weight,
                            const Matrix &dout);

/// y = x W + b with W stored Din x Dout and b as 1 x Dout.
class Linear {
public:
  Linear() = default;
  Linear(int in, int out, Rng &rng);

  int in_features() const { return static_cast<int>(weight.value.rows()); }
  int out_features() const { return static_cast<int>(weight.value.cols()); }

  Matrix forward(const Matrix &x) const;
  // Accumulates into weight.grad / bias.grad, returns dL/dx.
  Matrix backward(const Matrix &x, const Matrix &dout);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);

  Parameter weight;
  Parameter bias;
};

Matrix relu_forward(const Matrix &x);
// The subgradient at exactly zero is zero.
Matrix relu_backward(const Matrix &x, const Matrix &dout);

struct NormCache {
  Matrix xhat;
  RowVector inv_std;  // batch norm: per feature; layer norm: per row
  Mode mode = Mode::kTrain;
};

/// Batch normalization over rows with learnable scale and shift.
///
/// Train mode normalizes with the biased batch variance and folds the
/// unbiased variance into the running estimate; eval mode uses the running
/// statistics.
class BatchNorm {
public:
  BatchNorm() = default;
  explicit BatchNorm(int dim, double eps = 1e-5, double momentum = 0.1);

  int dim() const { return static_cast<int>(gamma.value.cols()); }

  Matrix forward(const Matrix &x, Mode mode, NormCache *cache = nullptr);
  Matrix backward(const NormCache &cache, const Matrix &dout);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);
  void collect_buffers(const std::string &prefix,
                       std::vector<NamedBuffer> &out);

  Parameter gamma;
  Parameter beta;
  Matrix running_mean;
  Matrix running_var;
  double eps = 1e-5;
  double momentum = 0.1;
};

// Per-row normalization used inside transformer blocks.
class LayerNorm {
public:
  LayerNorm() = default;
  explicit LayerNorm(int dim, double eps = 1e-5);

  Matrix forward(const Matrix &x, NormCache *cache = nullptr) const;
  Matrix backward(const NormCache &cache, const Matrix &dout);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);

  Parameter gamma;
  Parameter beta;
  double eps = 1e-5;
};

Matrix softmax_rows(const Matrix &scores);
// Backward of a row-wise softmax given its output.
Matrix softmax_rows_backward(const Matrix &probs, const Matrix &dout);

struct CrossEntropy {
  double loss;
  Matrix dscores;
};

/// Mean over rows of -log softmax(scores)[target], stabilized by row-max
/// subtraction. The gradient is (softmax - onehot) / B.
CrossEntropy softmax_cross_entropy(const Matrix &scores,
                                   std::span<const int> targets);

/// Maximum relative error between analytic and central-difference
/// gradients of f at params.
///
/// Coordinates where |analytic| + |numeric| <= 1e-8 are skipped. The
/// relative error of a coordinate is |a - n| / (|a| + |n|). f is evaluated
/// twice at params first; differing values raise NumericError.
double finite_diff_check(const std::function<double(std::span<const double>)> &f,
                         std::span<const double> params,
                         std::span<const double> analytic, double eps = 1e-5);

// Flat views over a parameter list, in list order.
std::vector<double> flatten_values(std::span<const NamedParameter> params);
std::vector<double> flatten_grads(std::span<const NamedParameter> params);
void assign_values(std::span<const NamedParameter> params,
                   std::span<const double> flat);
void zero_grads(std::span<const NamedParameter> params);

}  // namespace pepview

#endif  // PEPVIEW_NN_H_
