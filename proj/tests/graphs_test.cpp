//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/graphs.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace pepview {
namespace {
int count_type(const std::vector<Edge> &edges, EdgeType type) {
  return static_cast<int>(std::count_if(
      edges.begin(), edges.end(), [&](const Edge &e) { return e.type == type; }));
}

TEST(SequentialEdges, Examples) {
  EXPECT_EQ(sequential_edges(1).size(), 1);
  const auto three = sequential_edges(3);
  EXPECT_EQ(three.size(), 9);
  EXPECT_EQ(count_type(three, EdgeType::kSeqSelf), 3);
  EXPECT_EQ(count_type(three, EdgeType::kSeqPlus1), 2);
  EXPECT_EQ(count_type(three, EdgeType::kSeqMinus1), 2);
  EXPECT_EQ(count_type(three, EdgeType::kSeqPlus2), 1);
  EXPECT_EQ(count_type(three, EdgeType::kSeqMinus2), 1);
  const auto two = sequential_edges(2);
  EXPECT_EQ(two.size(), 4);
  EXPECT_EQ(count_type(two, EdgeType::kSeqPlus2), 0);
}

TEST(SequentialEdges, OffsetMatchesType) {
  for (const auto &e: sequential_edges(7))
    EXPECT_EQ(sequential_edge_type(e.dst - e.src), e.type);
}

TEST(RadiusEdges, Examples) {
  EXPECT_EQ(radius_edges(test::collinear({ 0, 1, 3 }), 1.5),
            (std::vector<Edge> { { 0, 1, EdgeType::kRadius },
                                 { 1, 0, EdgeType::kRadius } }));
  EXPECT_TRUE(radius_edges(test::collinear({ 0, 5, 11 }), 2).empty());
  EXPECT_TRUE(radius_edges(test::collinear({ 0, 2 }), 2).empty());
}

TEST(KnnEdges, Examples) {
  EXPECT_EQ(knn_edges(test::collinear({ 0, 1, 3 }), 1),
            (std::vector<Edge> { { 0, 1, EdgeType::kKnn },
                                 { 1, 0, EdgeType::kKnn },
                                 { 1, 2, EdgeType::kKnn } }));
  EXPECT_EQ(knn_edges(test::collinear({ 0, 1, 3, 7 }), 3).size(), 12);
  // Nodes 1 and 2 are both 1 A from node 0.
  const std::vector<Vec3> tie { { 0, 0, 0 }, { 1, 0, 0 }, { 0, 1, 0 } };
  const auto edges = knn_edges(tie, 1);
  EXPECT_NE(std::find(edges.begin(), edges.end(),
                      Edge { 1, 0, EdgeType::kKnn }),
            edges.end());
  EXPECT_EQ(std::find(edges.begin(), edges.end(),
                      Edge { 2, 0, EdgeType::kKnn }),
            edges.end());
}

// A uniform 3.8 A chain ties i-1 and i+1; a rotation must not flip the
// tie through roundoff.
TEST(KnnEdges, TiesSurviveRotation) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto chain = test::random_walk(12, rng);
    const double a = rng.uniform(0, 6.28), c = std::cos(a), s = std::sin(a);
    std::vector<Vec3> rotated;
    for (const auto &p: chain)
      rotated.push_back({ c * p[0] - s * p[1] + 7, s * p[0] + c * p[1] - 3,
                          p[2] + 11 });
    EXPECT_EQ(knn_edges(chain, 1), knn_edges(rotated, 1));
    EXPECT_EQ(knn_edges(chain, 3), knn_edges(rotated, 3));
  }
}

TEST(KnnEdges, RejectsBadK) {
  EXPECT_THROW(knn_edges(test::collinear({ 0, 1, 3 }), 3), ConfigError);
  EXPECT_THROW(knn_edges(test::collinear({ 0, 1, 3 }), 0), ConfigError);
}

TEST(BuildGraph, SingleResidue) {
  PeptideRecord r { "one", "A", { { 0, 0, 0 } } };
  const ResidueGraph g = build_residue_graph(r, {});
  EXPECT_EQ(g.num_nodes, 1);
  EXPECT_EQ(g.edges, (std::vector<Edge> { { 0, 0, EdgeType::kSeqSelf } }));
  EXPECT_EQ(g.node_features(0, kNumResidueTypes), 0.0);
}

TEST(BuildGraph, CollinearThreeMatchesEnumeration) {
  PeptideRecord r { "tri", "ACD", test::collinear({ 0, 3.8, 7.6 }) };
  GraphConfig cfg { 10.0, 1, false };
  const ResidueGraph g = build_residue_graph(r, cfg);

  std::set<std::tuple<int, int, int>> expected;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (std::abs(j - i) <= 2)
        expected.insert({ static_cast<int>(sequential_edge_type(j - i)), i, j });
      if (i != j)
        expected.insert({ static_cast<int>(EdgeType::kRadius), i, j });
    }
  // Nearest neighbour of 0 is 1, of 1 is 0 (tie with 2, lower index), of 2
  // is 1.
  expected.insert({ static_cast<int>(EdgeType::kKnn), 1, 0 });
  expected.insert({ static_cast<int>(EdgeType::kKnn), 0, 1 });
  expected.insert({ static_cast<int>(EdgeType::kKnn), 1, 2 });

  std::set<std::tuple<int, int, int>> got;
  for (const auto &e: g.edges)
    got.insert({ static_cast<int>(e.type), e.src, e.dst });
  EXPECT_EQ(got, expected);
  EXPECT_EQ(g.edges.size(), 9 + 6 + 3);
  EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end()));
}

TEST(BuildGraph, Features) {
  PeptideRecord r { "f", "ACW", test::collinear({ 0, 3.8, 7.6 }) };
  const ResidueGraph g = build_residue_graph(r, { 10.0, 2, false });
  ASSERT_EQ(g.node_features.cols(), kNodeFeatureDim);
  ASSERT_EQ(g.edge_features.cols(), kEdgeFeatureDim);
  EXPECT_EQ(g.node_features(2, residue_index('W')), 1.0);
  EXPECT_EQ(g.node_features(0, kNumResidueTypes), 0.0);
  EXPECT_EQ(g.node_features(1, kNumResidueTypes), 0.5);
  EXPECT_EQ(g.node_features(2, kNumResidueTypes), 1.0);

  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge &edge = g.edges[e];
    const auto row = g.edge_features.row(static_cast<Eigen::Index>(e));
    EXPECT_EQ(row(static_cast<int>(edge.type)), 1.0);
    EXPECT_EQ(row(kNumEdgeTypes + residue_index(r.sequence[edge.src])), 1.0);
    EXPECT_EQ(row(kNumEdgeTypes + kNumResidueTypes
                  + residue_index(r.sequence[edge.dst])),
              1.0);
    EXPECT_DOUBLE_EQ(row(kEdgeFeatureDim - 2), 0.1 * std::abs(edge.dst - edge.src));
    EXPECT_NEAR(row(kEdgeFeatureDim - 1),
                3.8 * std::abs(edge.dst - edge.src) / 10.0, 1e-12);
  }
}

TEST(BuildGraph, MaskingKeepsTopology) {
  Rng rng(3);
  const PeptideRecord r = test::random_record("m", 12, rng);
  const ResidueGraph plain = build_residue_graph(r, { 10.0, 4, false });
  const ResidueGraph masked = build_residue_graph(r, { 10.0, 4, true });
  EXPECT_EQ(plain.edges, masked.edges);
  EXPECT_EQ(masked.node_features.leftCols(kNumResidueTypes).cwiseAbs().sum(), 0);
  EXPECT_EQ(masked.edge_features.middleCols(kNumEdgeTypes, 2 * kNumResidueTypes)
                .cwiseAbs()
                .sum(),
            0);
  EXPECT_EQ(plain.node_features.col(kNumResidueTypes),
            masked.node_features.col(kNumResidueTypes));
}

TEST(BuildGraph, Invariants) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(49));
    const PeptideRecord r = test::random_record("p", n, rng);
    const ResidueGraph g = build_residue_graph(
        r, { rng.uniform(2, 15), 1 + static_cast<int>(rng.below(12)), false });
    EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end()));
    EXPECT_EQ(std::adjacent_find(g.edges.begin(), g.edges.end()), g.edges.end());
    std::set<std::tuple<int, int, int>> all;
    for (const auto &e: g.edges) {
      ASSERT_GE(e.src, 0);
      ASSERT_LT(e.dst, n);
      all.insert({ e.src, e.dst, static_cast<int>(e.type) });
    }
    for (int i = 0; i < n; ++i)
      EXPECT_TRUE(all.count({ i, i, static_cast<int>(EdgeType::kSeqSelf) }));
    for (const auto &e: g.edges)
      if (e.type == EdgeType::kRadius)
        EXPECT_TRUE(all.count({ e.dst, e.src, static_cast<int>(e.type) }));
  }
}

TEST(BuildGraph, FileOrderDoesNotMatter) {
  Rng rng(4);
  const PeptideRecord r = test::random_record("p", 15, rng);
  const ResidueGraph g = build_residue_graph(r, {});
  auto shuffled = knn_edges(r.coords, 5);
  rng.shuffle(shuffled);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, knn_edges(r.coords, 5));
  EXPECT_EQ(build_residue_graph(r, {}).edges, g.edges);
}

TEST(BuildGraph, ScalingChangesTopology) {
  Rng rng(6);
  const PeptideRecord r = test::random_record("p", 20, rng);
  PeptideRecord doubled = r;
  for (auto &c: doubled.coords)
    for (double &x: c)
      x *= 2;
  EXPECT_NE(build_residue_graph(r, {}).edges,
            build_residue_graph(doubled, {}).edges);
}

TEST(GraphConfig, Validation) {
  EXPECT_THROW((GraphConfig { 0.0, 10, false }.validate()), ConfigError);
  EXPECT_THROW((GraphConfig { 10.0, 0, false }.validate()), ConfigError);
  EXPECT_NO_THROW(GraphConfig {}.validate());
}
}  // namespace
}  // namespace pepview
