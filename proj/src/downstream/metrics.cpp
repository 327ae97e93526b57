//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pepview/core.h"
#include "pepview/downstream.h"
#include "pepview/graphs.h"

namespace pepview {
namespace {
template <class A, class B>
void require_aligned(std::span<A> a, std::span<B> b, std::string_view what) {
  if (a.size() != b.size())
    throw ConfigError(std::string(what) + ": " + std::to_string(a.size())
                      + " predictions vs " + std::to_string(b.size())
                      + " labels");
}

struct Confusion {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};

Confusion confusion(std::span<const double> scores,
                    std::span<const int> labels, double threshold) {
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual)
      ++c.tp;
    else if (predicted)
      ++c.fp;
    else if (actual)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}
}  // namespace

double accuracy(std::span<const double> scores, std::span<const int> labels,
                double threshold) {
  require_aligned(scores, labels, "accuracy");
  if (scores.empty())
    return 0;
  const Confusion c = confusion(scores, labels, threshold);
  return (c.tp + c.tn) / static_cast<double>(scores.size());
}

double f1_score(std::span<const double> scores, std::span<const int> labels,
                double threshold) {
  require_aligned(scores, labels, "f1");
  const Confusion c = confusion(scores, labels, threshold);
  const double precision = c.tp + c.fp > 0 ? c.tp / (c.tp + c.fp) : 0.0;
  const double recall = c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
  if (precision + recall == 0)
    return 0;
  return 2 * precision * recall / (precision + recall);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
      ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const int> labels) {
  require_aligned(scores, labels, "roc_auc");
  const std::vector<double> ranks = average_ranks(scores);
  double positives = 0, rank_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != 0) {
      ++positives;
      rank_sum += ranks[i];
    }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0 || negatives == 0)
    return std::nullopt;
  return (rank_sum - positives * (positives + 1) / 2) / (positives * negatives);
}

double rmse(std::span<const double> predictions,
            std::span<const double> targets) {
  require_aligned(predictions, targets, "rmse");
  if (predictions.empty())
    return 0;
  double sq = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    sq += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
  return std::sqrt(sq / static_cast<double>(predictions.size()));
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  require_aligned(x, y, "pearson");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2)
    return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x,
                               std::span<const double> y) {
  require_aligned(x, y, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

Matrix self_contact_targets(const PeptideRecord &record, double threshold,
                            int min_sep) {
  if (min_sep < 1)
    throw ConfigError("contact min_sep must be at least 1");
  const auto n = static_cast<int>(record.size());
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + min_sep; j < n; ++j)
      if (distance(record.coords[i], record.coords[j]) < threshold)
        m(i, j) = m(j, i) = 1.0;
  return m;
}

}  // namespace pepview
