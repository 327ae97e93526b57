//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <vector>

#include "pepview/core.h"
#include "pepview/nn.h"

namespace pepview {

double finite_diff_check(
    const std::function<double(std::span<const double>)> &f,
    std::span<const double> params, std::span<const double> analytic,
    double eps) {
  if (params.size() != analytic.size())
    throw ConfigError("finite_diff_check: " + std::to_string(params.size())
                      + " parameters but " + std::to_string(analytic.size())
                      + " analytic gradients");

  std::vector<double> theta(params.begin(), params.end());
  const double f0 = f(theta);
  if (f(theta) != f0)
    throw NumericError("finite_diff_check: objective is not deterministic");

  double worst = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + eps;
    const double up = f(theta);
    theta[i] = saved - eps;
    const double down = f(theta);
    theta[i] = saved;

    const double numeric = (up - down) / (2 * eps);
    const double scale = std::abs(analytic[i]) + std::abs(numeric);
    if (!std::isfinite(numeric))
      throw NumericError("finite_diff_check: non-finite objective");
    if (scale <= 1e-8)
      continue;
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

std::vector<double> flatten_values(std::span<const NamedParameter> params) {
  std::vector<double> flat;
  for (const auto &p: params)
    flat.insert(flat.end(), p.param->value.data(),
                p.param->value.data() + p.param->value.size());
  return flat;
}

std::vector<double> flatten_grads(std::span<const NamedParameter> params) {
  std::vector<double> flat;
  for (const auto &p: params)
    flat.insert(flat.end(), p.param->grad.data(),
                p.param->grad.data() + p.param->grad.size());
  return flat;
}

void assign_values(std::span<const NamedParameter> params,
                   std::span<const double> flat) {
  std::size_t offset = 0;
  for (const auto &p: params) {
    const auto n = static_cast<std::size_t>(p.param->value.size());
    if (offset + n > flat.size())
      throw ConfigError("assign_values: flat vector too short");
    std::copy_n(flat.begin() + offset, n, p.param->value.data());
    offset += n;
  }
  if (offset != flat.size())
    throw ConfigError("assign_values: flat vector too long");
}

void zero_grads(std::span<const NamedParameter> params) {
  for (const auto &p: params)
    p.param->zero_grad();
}

}  // namespace pepview
