//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string_view>

#include "pepview/core.h"

namespace pepview {
namespace {
struct TypeGeometry {
  double twist;   // degrees added to the 100 degree helical step
  double rise;    // Angstrom added to the 1.5 A rise
  double radius;  // Angstrom added to the 2.3 A helix radius
};

std::array<TypeGeometry, kNumResidueTypes> geometry_table(std::uint64_t seed) {
  Rng rng(seed);
  std::array<TypeGeometry, kNumResidueTypes> table;
  for (auto &t: table)
    t = { rng.uniform(-25.0, 25.0), rng.uniform(-0.4, 0.4),
          rng.uniform(-0.6, 0.6) };
  return table;
}

// Kyte-Doolittle hydropathy.
double hydropathy(char c) {
  switch (c) {
  case 'I': return 4.5;
  case 'V': return 4.2;
  case 'L': return 3.8;
  case 'F': return 2.8;
  case 'C': return 2.5;
  case 'M': return 1.9;
  case 'A': return 1.8;
  case 'G': return -0.4;
  case 'T': return -0.7;
  case 'S': return -0.8;
  case 'W': return -0.9;
  case 'Y': return -1.3;
  case 'P': return -1.6;
  case 'H': return -3.2;
  case 'E': case 'Q': case 'D': case 'N': return -3.5;
  case 'K': return -3.9;
  case 'R': return -4.5;
  default: return 0.0;
  }
}
}  // namespace

std::vector<Vec3> synthetic_backbone(const std::string &sequence,
                                     std::uint64_t geometry_seed) {
  const auto table = geometry_table(geometry_seed);
  std::vector<Vec3> coords;
  coords.reserve(sequence.size());

  double angle = 0, height = 0;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const int t = residue_index(sequence[i]);
    const TypeGeometry &g = table[t < 0 ? kNumResidueTypes - 1 : t];
    if (i > 0) {
      angle += (100.0 + g.twist) * std::numbers::pi / 180.0;
      height += 1.5 + g.rise;
    }
    const double r = 2.3 + g.radius;
    coords.push_back({ r * std::cos(angle), r * std::sin(angle), height });
  }
  return coords;
}

std::vector<PeptideRecord> generate_synthetic(const SyntheticConfig &config) {
  if (config.min_length < 1 || config.max_length < config.min_length)
    throw ConfigError("synthetic lengths need 1 <= min <= max");
  if (config.num_train < 0 || config.num_test < 0)
    throw ConfigError("synthetic record counts must be non-negative");

  constexpr std::string_view kStandard = kResidueAlphabet.substr(0, 20);
  Rng rng(config.seed);
  std::vector<PeptideRecord> out;
  const int total = config.num_train + config.num_test;
  for (int k = 0; k < total; ++k) {
    PeptideRecord r;
    char id[32];
    std::snprintf(id, sizeof(id), "syn%05d", k);
    r.id = id;

    const auto span = static_cast<std::size_t>(config.max_length
                                               - config.min_length + 1);
    const auto length = config.min_length + static_cast<int>(rng.below(span));
    int charge = 0, hydrophobic = 0;
    double hydro_sum = 0;
    for (int i = 0; i < length; ++i) {
      const char c = kStandard[rng.below(kStandard.size())];
      r.sequence.push_back(c);
      charge += (c == 'K' || c == 'R') - (c == 'D' || c == 'E');
      hydrophobic += std::string_view("AILMFVW").find(c) != std::string_view::npos;
      hydro_sum += hydropathy(c);
    }
    r.coords = synthetic_backbone(r.sequence, config.geometry_seed);

    r.plddt.emplace();
    const double base = rng.uniform(55.0, 98.0);
    for (int i = 0; i < length; ++i)
      r.plddt->push_back(std::clamp(base + rng.uniform(-4.0, 4.0), 0.0, 100.0));

    r.labels["cpp"] = charge > 0 ? 1.0 : 0.0;
    r.labels["solubility"] =
        static_cast<double>(hydrophobic) / length < 0.35 ? 1.0 : 0.0;
    r.labels["affinity"] = hydro_sum / length + 0.05 * length;
    r.split = k < config.num_train ? Split::kTrain : Split::kTest;
    r.source = Source::kPredicted;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pepview
