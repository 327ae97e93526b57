//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_SYNTHETIC_H_
#define PEPVIEW_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pepview/ingest.h"

namespace pepview {

struct SyntheticConfig {
  int num_train = 256;
  int num_test = 64;
  int min_length = 8;
  int max_length = 40;
  std::uint64_t seed = 0;
  // Seeds the per-residue-type geometry table; shared by every record so
  // structure is a fixed function of sequence.
  std::uint64_t geometry_seed = 17;
};

/// Helix-like C-alpha trace whose twist, rise and radius are perturbed per
/// residue type. Identical sequences always give identical coordinates.
std::vector<Vec3> synthetic_backbone(const std::string &sequence,
                                     std::uint64_t geometry_seed);

/**
 * Paired sequence/structure benchmark. Records carry "cpp" and
 * "solubility" binary labels and an "affinity" regression label derived
 * from composition, a pLDDT track, and train/test splits (train first).
 */
std::vector<PeptideRecord> generate_synthetic(const SyntheticConfig &config);

}  // namespace pepview

#endif  // PEPVIEW_SYNTHETIC_H_
