//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_SRC_ENCODERS_READOUT_H_
#define PEPVIEW_SRC_ENCODERS_READOUT_H_

#include <vector>

#include "pepview/encoders.h"

namespace pepview {
namespace internal {
inline Matrix pool(const Matrix &residues, const std::vector<int> &offsets,
                   Readout readout) {
  const int graphs = static_cast<int>(offsets.size()) - 1;
  Matrix pooled = Matrix::Zero(graphs, residues.cols());
  for (int b = 0; b < graphs; ++b) {
    const int n = offsets[b + 1] - offsets[b];
    if (n == 0)
      continue;
    pooled.row(b) = residues.middleRows(offsets[b], n).colwise().sum();
    if (readout == Readout::kMean)
      pooled.row(b) /= n;
  }
  return pooled;
}

inline void pool_backward(const Matrix &d_pooled,
                          const std::vector<int> &offsets, Readout readout,
                          Matrix &d_residues) {
  const int graphs = static_cast<int>(offsets.size()) - 1;
  for (int b = 0; b < graphs; ++b) {
    const int n = offsets[b + 1] - offsets[b];
    if (n == 0)
      continue;
    const double scale = readout == Readout::kMean ? 1.0 / n : 1.0;
    d_residues.middleRows(offsets[b], n).rowwise() += scale * d_pooled.row(b);
  }
}
}  // namespace internal
}  // namespace pepview

#endif  // PEPVIEW_SRC_ENCODERS_READOUT_H_
