//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_ENCODERS_H_
#define PEPVIEW_ENCODERS_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pepview/graphs.h"
#include "pepview/nn.h"

namespace pepview {

enum class Readout { kMean, kSum };

std::string_view to_string(Readout readout);
Readout parse_readout(std::string_view text);

/// Disjoint union of residue graphs; node i of graph b sits at row
/// offsets[b] + i.
struct GraphBatch {
  int num_nodes = 0;
  std::vector<int> offsets;
  Matrix node_features;
  // Per edge type: (src, dst) pairs ordered by (src, dst).
  std::array<std::vector<std::pair<int, int>>, kNumEdgeTypes> edges;

  int num_graphs() const { return static_cast<int>(offsets.size()) - 1; }
};

GraphBatch batch_graphs(std::span<const ResidueGraph *const> graphs);
GraphBatch batch_graphs(const ResidueGraph &graph);

struct RgcnLayer {
  // One kernel per edge type, hidden x hidden.
  std::array<Parameter, kNumEdgeTypes> kernels;
  BatchNorm norm;

  RgcnLayer() = default;
  RgcnLayer(int hidden, Rng &rng);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);
};

struct RgcnCache {
  std::array<Matrix, kNumEdgeTypes> aggregates;
  NormCache norm;
  Matrix normalized;
};

/// h' = h + ReLU(BN(sum_r (sum_{(j,i,r) in E} h_j) W_r)).
Matrix rgcn_layer_forward(const Matrix &h, const GraphBatch &graph,
                          RgcnLayer &layer, Mode mode,
                          RgcnCache *cache = nullptr);
Matrix rgcn_layer_backward(const Matrix &dout, const GraphBatch &graph,
                           RgcnLayer &layer, const RgcnCache &cache);

struct EncoderOutput {
  Matrix residues;  // total nodes x D
  Matrix pooled;    // graphs (or 1 for a sequence) x D
};

struct StructureEncoderConfig {
  int input_dim = kNodeFeatureDim;
  int hidden = 64;
  int layers = 3;
  Readout readout = Readout::kMean;
};

class StructureEncoder {
public:
  struct Cache {
    Matrix input;
    std::vector<Matrix> layer_inputs;
    std::vector<RgcnCache> layers;
  };

  StructureEncoder() = default;
  StructureEncoder(const StructureEncoderConfig &config, Rng &rng);

  const StructureEncoderConfig &config() const { return config_; }

  EncoderOutput forward(const GraphBatch &graph, Mode mode,
                        Cache *cache = nullptr);
  // Accumulates parameter gradients; returns the gradient w.r.t. node
  // features. Either upstream gradient may be empty.
  Matrix backward(const GraphBatch &graph, const Cache &cache,
                  const Matrix &d_residues, const Matrix &d_pooled);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);
  void collect_buffers(const std::string &prefix,
                       std::vector<NamedBuffer> &out);

  Linear input_projection;
  std::vector<RgcnLayer> layers;

private:
  StructureEncoderConfig config_;
};

std::vector<int> tokenize(std::string_view sequence);
Matrix sinusoidal_encoding(int length, int dim);

struct TransformerBlock {
  int heads = 4;
  LayerNorm norm1;
  Linear query, key, value, output;
  LayerNorm norm2;
  Linear ff1, ff2;

  TransformerBlock() = default;
  TransformerBlock(int hidden, int heads, Rng &rng);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);
};

struct TransformerBlockCache {
  NormCache norm1;
  Matrix normed1, q, k, v;
  std::vector<Matrix> attention;
  Matrix context;
  Matrix mid;
  NormCache norm2;
  Matrix normed2, ff_pre, ff_act;
};

// Pre-norm block: x + MHA(LN(x)), then + FFN(LN(.)).
Matrix transformer_block_forward(const TransformerBlock &block,
                                 const Matrix &x,
                                 TransformerBlockCache *cache = nullptr);
Matrix transformer_block_backward(TransformerBlock &block,
                                  const TransformerBlockCache &cache,
                                  const Matrix &dout);

struct SequenceEncoderConfig {
  int hidden = 64;
  int blocks = 2;
  int heads = 4;
  Readout readout = Readout::kMean;
};

class SequenceEncoder {
public:
  struct Cache {
    std::vector<int> tokens;
    std::vector<Matrix> block_inputs;
    std::vector<TransformerBlockCache> blocks;
    NormCache final_norm;
  };

  SequenceEncoder() = default;
  SequenceEncoder(const SequenceEncoderConfig &config, Rng &rng);

  const SequenceEncoderConfig &config() const { return config_; }

  EncoderOutput forward(std::span<const int> tokens,
                        Cache *cache = nullptr) const;
  void backward(const Cache &cache, const Matrix &d_residues,
                const Matrix &d_pooled);

  void collect(const std::string &prefix, std::vector<NamedParameter> &out);

  Parameter token_embedding;
  std::vector<TransformerBlock> blocks;
  LayerNorm final_norm;

private:
  SequenceEncoderConfig config_;
};

}  // namespace pepview

#endif  // PEPVIEW_ENCODERS_H_
