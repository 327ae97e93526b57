//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_GRAPHS_H_
#define PEPVIEW_GRAPHS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pepview/ingest.h"
#include "pepview/nn.h"

namespace pepview {

// Sequential offsets -2..+2 followed by the two spatial edge families. The
// enumerator value is the canonical sort key.
enum class EdgeType : int {
  kSeqMinus2 = 0,
  kSeqMinus1,
  kSeqSelf,
  kSeqPlus1,
  kSeqPlus2,
  kRadius,
  kKnn,
};

inline constexpr int kNumEdgeTypes = 7;

constexpr EdgeType sequential_edge_type(int offset) {
  return static_cast<EdgeType>(offset + 2);
}

std::string_view to_string(EdgeType type);

struct Edge {
  int src;
  int dst;
  EdgeType type;

  auto operator<=>(const Edge &other) const {
    if (auto c = type <=> other.type; c != 0)
      return c;
    if (auto c = src <=> other.src; c != 0)
      return c;
    return dst <=> other.dst;
  }
  bool operator==(const Edge &) const = default;
};

struct GraphConfig {
  double radius_cutoff = 10.0;
  int knn_k = 10;
  bool mask_residue_identity = false;

  void validate() const;
};

inline constexpr int kNodeFeatureDim = kNumResidueTypes + 1;
inline constexpr int kEdgeFeatureDim = kNumEdgeTypes + 2 * kNumResidueTypes + 2;

/// Residue-level relational graph. Features hold only indices and
/// distances, never raw coordinates; coords are kept for building
/// supervision targets.
struct ResidueGraph {
  int num_nodes = 0;
  // Deduplicated, sorted by (type, src, dst).
  std::vector<Edge> edges;
  Matrix node_features;
  Matrix edge_features;
  std::vector<Vec3> coords;
};

std::vector<Edge> sequential_edges(int n);

// Both directions of every pair closer than cutoff (strict).
std::vector<Edge> radius_edges(std::span<const Vec3> coords, double cutoff);

// Edges (j, i) from each node's k nearest neighbours; ties go to the lower
// index. Requires 1 <= k < n.
std::vector<Edge> knn_edges(std::span<const Vec3> coords, int k);

// The k-NN family uses min(k, n - 1) neighbours, so peptides shorter than
// k + 1 residues get complete neighbourhoods and single residues get none.
ResidueGraph build_residue_graph(const PeptideRecord &record,
                                 const GraphConfig &config);

double distance(const Vec3 &a, const Vec3 &b);

}  // namespace pepview

#endif  // PEPVIEW_GRAPHS_H_
