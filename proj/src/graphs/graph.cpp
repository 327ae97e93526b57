//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pepview/core.h"
#include "pepview/graphs.h"

namespace pepview {

std::string_view to_string(EdgeType type) {
  switch (type) {
  case EdgeType::kSeqMinus2:
    return "seq-2";
  case EdgeType::kSeqMinus1:
    return "seq-1";
  case EdgeType::kSeqSelf:
    return "seq0";
  case EdgeType::kSeqPlus1:
    return "seq+1";
  case EdgeType::kSeqPlus2:
    return "seq+2";
  case EdgeType::kRadius:
    return "radius";
  case EdgeType::kKnn:
    return "knn";
  }
  return "?";
}

void GraphConfig::validate() const {
  if (!(radius_cutoff > 0) || !std::isfinite(radius_cutoff))
    throw ConfigError("radius cutoff must be positive");
  if (knn_k < 1)
    throw ConfigError("knn k must be at least 1");
}

double distance(const Vec3 &a, const Vec3 &b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<Edge> sequential_edges(int n) {
  std::vector<Edge> edges;
  for (int d = -2; d <= 2; ++d)
    for (int i = 0; i < n; ++i) {
      const int j = i + d;
      if (j >= 0 && j < n)
        edges.push_back({ i, j, sequential_edge_type(d) });
    }
  return edges;
}

std::vector<Edge> radius_edges(std::span<const Vec3> coords, double cutoff) {
  const int n = static_cast<int>(coords.size());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && distance(coords[i], coords[j]) < cutoff)
        edges.push_back({ i, j, EdgeType::kRadius });
  return edges;
}

std::vector<Edge> knn_edges(std::span<const Vec3> coords, int k) {
  const int n = static_cast<int>(coords.size());
  if (k < 1 || k >= n)
    throw ConfigError("knn requires 1 <= k < n (k=" + std::to_string(k)
                      + ", n=" + std::to_string(n) + ")");

  std::vector<Edge> edges;
  std::vector<int> order(n - 1);
  // Distances are snapped to a 1e-9 A grid so that ties (e.g. uniform
  // 3.8 A backbone spacing) stay ties after a rigid motion perturbs the
  // last bits, and are then broken by index.
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      dist[j] = std::round(distance(coords[i], coords[j]) * 1e9);
    order.clear();
    for (int j = 0; j < n; ++j)
      if (j != i)
        order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](int a, int b) {
                        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                      });
    for (int q = 0; q < k; ++q)
      edges.push_back({ order[q], i, EdgeType::kKnn });
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

ResidueGraph build_residue_graph(const PeptideRecord &record,
                                 const GraphConfig &config) {
  config.validate();
  validate_record(record);

  const int n = static_cast<int>(record.size());
  ResidueGraph g;
  g.num_nodes = n;
  g.coords = record.coords;

  g.edges = sequential_edges(n);
  auto radius = radius_edges(record.coords, config.radius_cutoff);
  g.edges.insert(g.edges.end(), radius.begin(), radius.end());
  const int k = std::min(config.knn_k, n - 1);
  if (k >= 1) {
    auto knn = knn_edges(record.coords, k);
    g.edges.insert(g.edges.end(), knn.begin(), knn.end());
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  std::vector<int> tokens(n);
  for (int i = 0; i < n; ++i)
    tokens[i] = residue_index(record.sequence[i]);
  const bool show_identity = !config.mask_residue_identity;

  g.node_features = Matrix::Zero(n, kNodeFeatureDim);
  for (int i = 0; i < n; ++i) {
    if (show_identity)
      g.node_features(i, tokens[i]) = 1.0;
    g.node_features(i, kNumResidueTypes) =
        n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
  }

  constexpr int kSrcOffset = kNumEdgeTypes;
  constexpr int kDstOffset = kSrcOffset + kNumResidueTypes;
  constexpr int kSeqDistCol = kDstOffset + kNumResidueTypes;
  constexpr int kSpatialCol = kSeqDistCol + 1;

  const auto m = static_cast<Eigen::Index>(g.edges.size());
  g.edge_features = Matrix::Zero(m, kEdgeFeatureDim);
  for (Eigen::Index e = 0; e < m; ++e) {
    const Edge &edge = g.edges[e];
    g.edge_features(e, static_cast<int>(edge.type)) = 1.0;
    if (show_identity) {
      g.edge_features(e, kSrcOffset + tokens[edge.src]) = 1.0;
      g.edge_features(e, kDstOffset + tokens[edge.dst]) = 1.0;
    }
    g.edge_features(e, kSeqDistCol) =
        0.1 * std::min(std::abs(edge.dst - edge.src), 10);
    g.edge_features(e, kSpatialCol) =
        distance(record.coords[edge.src], record.coords[edge.dst])
        / config.radius_cutoff;
  }
  return g;
}

}  // namespace pepview
