//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_GRADCHECK_H_
#define PEPVIEW_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pepview/nn.h"

namespace pepview {

/// Runs loss() then backward() from zeroed gradients and compares the
/// accumulated gradients of params against central differences of loss().
/// Parameter values are restored afterwards.
double check_gradients(std::span<const NamedParameter> params,
                       const std::function<double()> &loss,
                       const std::function<void()> &backward,
                       double eps = 1e-5);

struct GradCheckRow {
  std::string name;
  int configurations = 0;
  double worst_error = 0;
  double tolerance = 0;

  bool passed() const { return worst_error < tolerance; }
};

// Finite-difference checks of every layer and loss backward pass over
// `configurations` random shapes each.
std::vector<GradCheckRow> run_gradcheck_suite(std::uint64_t seed,
                                              int configurations = 50);

std::string format_gradcheck_table(const std::vector<GradCheckRow> &rows);

}  // namespace pepview

#endif  // PEPVIEW_GRADCHECK_H_
