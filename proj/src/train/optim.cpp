//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pepview/core.h"
#include "pepview/train.h"

namespace pepview {

std::string_view to_string(BatchStrategy strategy) {
  return strategy == BatchStrategy::kLengthSorted ? "length_sorted" : "random";
}

BatchStrategy parse_batch_strategy(std::string_view text) {
  if (text == "random")
    return BatchStrategy::kRandom;
  if (text == "length_sorted" || text == "sorted")
    return BatchStrategy::kLengthSorted;
  throw ConfigError("unknown batch strategy '" + std::string(text) + "'");
}

std::vector<std::vector<std::size_t>> make_batch_indices(
    std::span<const PeptideRecord> records, std::size_t batch_size,
    BatchStrategy strategy, std::uint64_t seed) {
  if (batch_size < 1)
    throw ConfigError("batch size must be at least 1");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  if (strategy == BatchStrategy::kLengthSorted) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       const auto la = records[a].size(), lb = records[b].size();
                       return la < lb || (la == lb && records[a].id < records[b].id);
                     });
  } else {
    Rng rng(seed);
    rng.shuffle(order);
  }

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

std::vector<std::vector<std::string>> make_batches(
    std::span<const PeptideRecord> records, std::size_t batch_size,
    BatchStrategy strategy, std::uint64_t seed) {
  std::vector<std::vector<std::string>> out;
  for (const auto &batch:
       make_batch_indices(records, batch_size, strategy, seed)) {
    auto &ids = out.emplace_back();
    for (std::size_t i: batch)
      ids.push_back(records[i].id);
  }
  return out;
}

void adam_update(Matrix &value, const Matrix &grad, AdamMoments &moments,
                 long t, const AdamConfig &config) {
  if (moments.m.size() == 0) {
    moments.m = Matrix::Zero(value.rows(), value.cols());
    moments.v = Matrix::Zero(value.rows(), value.cols());
  }
  moments.m = config.beta1 * moments.m + (1 - config.beta1) * grad;
  moments.v =
      config.beta2 * moments.v + (1 - config.beta2) * grad.cwiseAbs2();

  const double m_scale = 1.0 / (1.0 - std::pow(config.beta1, t));
  const double v_scale = 1.0 / (1.0 - std::pow(config.beta2, t));
  value.array() -= config.lr * (moments.m.array() * m_scale)
                   / ((moments.v.array() * v_scale).sqrt() + config.eps);
}

void Adam::step(std::span<const NamedParameter> params) {
  for (const auto &p: params)
    if (!p.param->grad.allFinite())
      throw NumericError("non-finite gradient for '" + p.name
                         + "'; optimizer step rejected");

  ++t_;
  for (const auto &p: params) {
    auto it = moments_.find(p.name);
    if (it == moments_.end())
      it = moments_.emplace(p.name, AdamMoments {}).first;
    adam_update(p.param->value, p.param->grad, it->second, t_, config_);
  }
}

double clip_grad_norm(std::span<const NamedParameter> params,
                      double max_norm) {
  double sq = 0;
  for (const auto &p: params)
    sq += p.param->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const double scale = max_norm / norm;
    for (const auto &p: params)
      p.param->grad *= scale;
  }
  return norm;
}

}  // namespace pepview
