//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/encoders.h"

#include <gtest/gtest.h>

#include "pepview/gradcheck.h"
#include "test_util.h"

namespace pepview {
namespace {
TEST(Rgcn, HandExample) {
  PeptideRecord r { "one", "A", { { 0, 0, 0 } } };
  GraphBatch graph = batch_graphs(build_residue_graph(r, {}));
  Rng rng(0);
  RgcnLayer layer(1, rng);
  for (auto &k: layer.kernels)
    k.value.setZero();
  layer.kernels[static_cast<int>(EdgeType::kSeqSelf)].value(0, 0) = 2;
  layer.norm.eps = 0;
  const Matrix out =
      rgcn_layer_forward(Matrix::Ones(1, 1), graph, layer, Mode::kEval);
  EXPECT_EQ(out(0, 0), 3.0);
}

TEST(Rgcn, ZeroKernelsAreResidualOnly) {
  Rng rng(1);
  const PeptideRecord r = test::random_record("p", 6, rng);
  GraphBatch graph = batch_graphs(build_residue_graph(r, {}));
  RgcnLayer layer(4, rng);
  for (auto &k: layer.kernels)
    k.value.setZero();
  const Matrix h = test::random_matrix(6, 4, rng);
  EXPECT_EQ(rgcn_layer_forward(h, graph, layer, Mode::kTrain), h);
}

TEST(Rgcn, IsolatedNodeGetsZeroAggregate) {
  GraphBatch graph;
  graph.num_nodes = 2;
  graph.offsets = { 0, 2 };
  graph.edges[static_cast<int>(EdgeType::kSeqSelf)] = { { 0, 0 } };
  Rng rng(2);
  RgcnLayer layer(3, rng);
  RgcnCache cache;
  const Matrix h = test::random_matrix(2, 3, rng);
  rgcn_layer_forward(h, graph, layer, Mode::kEval, &cache);
  for (const auto &agg: cache.aggregates)
    EXPECT_EQ(agg.row(1).cwiseAbs().sum(), 0.0);
}

TEST(Batching, OffsetsAndEdges) {
  Rng rng(3);
  const auto a = build_residue_graph(test::random_record("a", 3, rng), {});
  const auto b = build_residue_graph(test::random_record("b", 4, rng), {});
  const ResidueGraph *ptrs[] = { &a, &b };
  const GraphBatch batch = batch_graphs(ptrs);
  EXPECT_EQ(batch.num_nodes, 7);
  EXPECT_EQ(batch.offsets, (std::vector<int> { 0, 3, 7 }));
  std::size_t total = 0;
  for (const auto &list: batch.edges) {
    total += list.size();
    for (auto [src, dst]: list)
      EXPECT_EQ(src < 3, dst < 3);
  }
  EXPECT_EQ(total, a.edges.size() + b.edges.size());
}

TEST(StructureEncoder, Shapes) {
  Rng rng(4);
  StructureEncoder enc({ kNodeFeatureDim, 8, 2, Readout::kMean }, rng);
  const auto g = build_residue_graph(test::random_record("s", 5, rng), {});
  const EncoderOutput out = enc.forward(batch_graphs(g), Mode::kEval);
  EXPECT_EQ(out.residues.rows(), 5);
  EXPECT_EQ(out.residues.cols(), 8);
  EXPECT_EQ(out.pooled.rows(), 1);
  EXPECT_EQ(out.pooled.cols(), 8);
  EXPECT_LT((out.pooled - out.residues.colwise().mean()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(StructureEncoder, WidthMismatch) {
  Rng rng(5);
  StructureEncoder enc({ 5, 8, 1, Readout::kMean }, rng);
  const auto g = build_residue_graph(test::random_record("s", 5, rng), {});
  EXPECT_THROW(enc.forward(batch_graphs(g), Mode::kEval), ConfigError);
}

TEST(StructureEncoder, MaskedIdentityIsInvisible) {
  Rng rng(6);
  StructureEncoder enc({ kNodeFeatureDim, 8, 2, Readout::kMean }, rng);
  PeptideRecord a = test::random_record("a", 9, rng);
  PeptideRecord b = a;
  b.sequence = test::random_sequence(9, rng);
  const GraphConfig masked { 10.0, 4, true };
  const Matrix ea =
      enc.forward(batch_graphs(build_residue_graph(a, masked)), Mode::kEval)
          .pooled;
  const Matrix eb =
      enc.forward(batch_graphs(build_residue_graph(b, masked)), Mode::kEval)
          .pooled;
  EXPECT_EQ(ea, eb);
}

TEST(SequenceEncoder, SingleTokenPooled) {
  Rng rng(7);
  SequenceEncoder enc({ 8, 2, 4, Readout::kMean }, rng);
  const std::vector<int> tok { 3 };
  const EncoderOutput out = enc.forward(tok);
  EXPECT_EQ(out.pooled, out.residues);
}

TEST(SequenceEncoder, PositionMatters) {
  Rng rng(8);
  SequenceEncoder enc({ 8, 2, 4, Readout::kMean }, rng);
  const std::vector<int> ab { 0, 5 }, ba { 5, 0 };
  EXPECT_GT((enc.forward(ab).pooled - enc.forward(ba).pooled)
                .cwiseAbs()
                .maxCoeff(),
            1e-6);
}

TEST(SequenceEncoder, RejectsBadHeadsAndTokens) {
  Rng rng(9);
  EXPECT_THROW(SequenceEncoder({ 10, 1, 4, Readout::kMean }, rng), ConfigError);
  SequenceEncoder enc({ 8, 1, 4, Readout::kMean }, rng);
  const std::vector<int> bad { 21 };
  EXPECT_THROW(enc.forward(bad), DataError);
  EXPECT_THROW(tokenize("AB*"), DataError);
}

TEST(SequenceEncoder, GradcheckOneBlockThreeTokens) {
  Rng rng(10);
  SequenceEncoder enc({ 8, 1, 2, Readout::kMean }, rng);
  const std::vector<int> tokens { 4, 0, 17 };
  const Matrix w = test::random_matrix(1, 8, rng);
  std::vector<NamedParameter> params;
  enc.collect("seq", params);
  SequenceEncoder::Cache cache;
  const double err = check_gradients(
      params,
      [&] { return (enc.forward(tokens, &cache).pooled.array() * w.array()).sum(); },
      [&] { enc.backward(cache, Matrix(), w); });
  EXPECT_LT(err, 1e-4);
}

TEST(Readout, SumIsCountTimesMean) {
  Rng a(11), b(11);
  StructureEncoder mean_enc({ kNodeFeatureDim, 4, 1, Readout::kMean }, a);
  StructureEncoder sum_enc({ kNodeFeatureDim, 4, 1, Readout::kSum }, b);
  const auto g = batch_graphs(
      build_residue_graph(test::random_record("r", 6, a), {}));
  EXPECT_LT((sum_enc.forward(g, Mode::kEval).pooled
             - 6 * mean_enc.forward(g, Mode::kEval).pooled)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_EQ(parse_readout("sum"), Readout::kSum);
  EXPECT_THROW(parse_readout("max"), ConfigError);
}
}  // namespace
}  // namespace pepview
