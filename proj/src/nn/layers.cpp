//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <string>

#include "pepview/core.h"
#include "pepview/nn.h"

namespace pepview {

std::string shape_string(const Matrix &m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

void require_finite(const Matrix &m, std::string_view what) {
  if (!m.allFinite())
    throw NumericError(std::string(what) + " contains non-finite values");
}

Matrix glorot(int fan_in, int fan_out, Rng &rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

Matrix linear_forward(const Matrix &x, const Matrix &weight,
                      const Matrix &bias) {
  if (x.cols() != weight.rows() || bias.rows() != 1
      || bias.cols() != weight.cols())
    throw ConfigError("linear shape mismatch: input " + shape_string(x)
                      + " vs weight " + shape_string(weight) + ", bias "
                      + shape_string(bias));
  Matrix y = x * weight;
  y.rowwise() += bias.row(0);
  return y;
}

LinearGrads linear_backward(const Matrix &x, const Matrix &weight,
                            const Matrix &dout) {
  if (dout.rows() != x.rows() || dout.cols() != weight.cols())
    throw ConfigError("linear backward shape mismatch: dout "
                      + shape_string(dout) + " vs output "
                      + std::to_string(x.rows()) + "x"
                      + std::to_string(weight.cols()));
  return { dout * weight.transpose(), x.transpose() * dout,
           dout.colwise().sum() };
}

Linear::Linear(int in, int out, Rng &rng)
    : weight(glorot(in, out, rng)), bias(Matrix::Zero(1, out)) { }

Matrix Linear::forward(const Matrix &x) const {
  return linear_forward(x, weight.value, bias.value);
}

Matrix Linear::backward(const Matrix &x, const Matrix &dout) {
  LinearGrads g = linear_backward(x, weight.value, dout);
  weight.grad += g.dweight;
  bias.grad += g.dbias;
  return std::move(g.dx);
}

void Linear::collect(const std::string &prefix,
                     std::vector<NamedParameter> &out) {
  out.push_back({ prefix + "/weight", &weight });
  out.push_back({ prefix + "/bias", &bias });
}

Matrix relu_forward(const Matrix &x) {
  return x.cwiseMax(0.0);
}

Matrix relu_backward(const Matrix &x, const Matrix &dout) {
  return (x.array() > 0.0).select(dout, 0.0);
}

BatchNorm::BatchNorm(int dim, double eps, double momentum)
    : gamma(Matrix::Ones(1, dim)), beta(Matrix::Zero(1, dim)),
      running_mean(Matrix::Zero(1, dim)), running_var(Matrix::Ones(1, dim)),
      eps(eps), momentum(momentum) { }

Matrix BatchNorm::forward(const Matrix &x, Mode mode, NormCache *cache) {
  if (x.cols() != dim())
    throw ConfigError("batch norm width mismatch: input " + shape_string(x)
                      + " vs features " + std::to_string(dim()));

  RowVector mean, var;
  if (mode == Mode::kTrain) {
    const auto rows = x.rows();
    if (rows < 2)
      throw ConfigError("batch norm in train mode needs at least 2 rows");
    mean = x.colwise().mean();
    var = (x.rowwise() - mean).array().square().colwise().mean();
    const double unbias =
        static_cast<double>(rows) / static_cast<double>(rows - 1);
    running_mean = (1 - momentum) * running_mean + momentum * mean;
    running_var = (1 - momentum) * running_var + (momentum * unbias) * var;
  } else {
    mean = running_mean.row(0);
    var = running_var.row(0);
  }

  const RowVector inv_std = (var.array() + eps).rsqrt().matrix();
  Matrix xhat = (x.rowwise() - mean).array().rowwise() * inv_std.array();
  Matrix y = (xhat.array().rowwise() * gamma.value.row(0).array()).matrix();
  y.rowwise() += beta.value.row(0);

  if (cache)
    *cache = { std::move(xhat), inv_std, mode };
  return y;
}

Matrix BatchNorm::backward(const NormCache &cache, const Matrix &dout) {
  gamma.grad += (dout.array() * cache.xhat.array()).colwise().sum().matrix();
  beta.grad += dout.colwise().sum();

  const Matrix dxhat = dout.array().rowwise() * gamma.value.row(0).array();
  if (cache.mode == Mode::kEval)
    return dxhat.array().rowwise() * cache.inv_std.array();

  const double rows = static_cast<double>(dout.rows());
  const RowVector sum_d = dxhat.colwise().sum();
  const RowVector sum_dx =
      (dxhat.array() * cache.xhat.array()).colwise().sum().matrix();
  Matrix centered = (dxhat * rows).rowwise() - sum_d;
  centered -= (cache.xhat.array().rowwise() * sum_dx.array()).matrix();
  return (centered.array().rowwise() * (cache.inv_std.array() / rows))
      .matrix();
}

void BatchNorm::collect(const std::string &prefix,
                        std::vector<NamedParameter> &out) {
  out.push_back({ prefix + "/gamma", &gamma });
  out.push_back({ prefix + "/beta", &beta });
}

void BatchNorm::collect_buffers(const std::string &prefix,
                                std::vector<NamedBuffer> &out) {
  out.push_back({ prefix + "/running_mean", &running_mean });
  out.push_back({ prefix + "/running_var", &running_var });
}

LayerNorm::LayerNorm(int dim, double eps)
    : gamma(Matrix::Ones(1, dim)), beta(Matrix::Zero(1, dim)), eps(eps) { }

Matrix LayerNorm::forward(const Matrix &x, NormCache *cache) const {
  if (x.cols() != gamma.value.cols())
    throw ConfigError("layer norm width mismatch: input " + shape_string(x)
                      + " vs gamma " + shape_string(gamma.value));

  const Eigen::VectorXd mean = x.rowwise().mean();
  const Matrix centered = x.colwise() - mean;
  const Eigen::VectorXd var = centered.array().square().rowwise().mean();
  const Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();

  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix y = xhat.array().rowwise() * gamma.value.row(0).array();
  y.rowwise() += beta.value.row(0);

  if (cache)
    *cache = { std::move(xhat), inv_std.transpose(), Mode::kTrain };
  return y;
}

Matrix LayerNorm::backward(const NormCache &cache, const Matrix &dout) {
  gamma.grad += (dout.array() * cache.xhat.array()).colwise().sum().matrix();
  beta.grad += dout.colwise().sum();

  const double cols = static_cast<double>(dout.cols());
  const Matrix dxhat = dout.array().rowwise() * gamma.value.row(0).array();
  const Eigen::VectorXd sum_d = dxhat.rowwise().sum();
  const Eigen::VectorXd sum_dx =
      (dxhat.array() * cache.xhat.array()).rowwise().sum();
  Matrix dx = (dxhat * cols).colwise() - sum_d;
  dx -= (cache.xhat.array().colwise() * sum_dx.array()).matrix();
  return dx.array().colwise() * (cache.inv_std.transpose().array() / cols);
}

void LayerNorm::collect(const std::string &prefix,
                        std::vector<NamedParameter> &out) {
  out.push_back({ prefix + "/gamma", &gamma });
  out.push_back({ prefix + "/beta", &beta });
}

Matrix softmax_rows(const Matrix &scores) {
  Matrix p = scores.colwise() - scores.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

Matrix softmax_rows_backward(const Matrix &probs, const Matrix &dout) {
  const Eigen::VectorXd dot = (probs.array() * dout.array()).rowwise().sum();
  return probs.array() * (dout.colwise() - dot).array();
}

CrossEntropy softmax_cross_entropy(const Matrix &scores,
                                   std::span<const int> targets) {
  if (static_cast<std::size_t>(scores.rows()) != targets.size())
    throw ConfigError("cross entropy: " + std::to_string(targets.size())
                      + " targets for scores " + shape_string(scores));
  if (!scores.allFinite())
    throw NumericError("cross entropy: non-finite scores");

  const auto rows = scores.rows();
  Matrix probs = softmax_rows(scores);
  double loss = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int t = targets[i];
    if (t < 0 || t >= scores.cols())
      throw ConfigError("cross entropy: target " + std::to_string(t)
                        + " outside [0, " + std::to_string(scores.cols())
                        + ")");
    const double max = scores.row(i).maxCoeff();
    const double lse =
        max + std::log((scores.row(i).array() - max).exp().sum());
    loss += lse - scores(i, t);
    probs(i, t) -= 1.0;
  }
  const double inv = 1.0 / static_cast<double>(rows);
  return { loss * inv, probs * inv };
}

}  // namespace pepview
