//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <string>

#include "pepview/core.h"
#include "pepview/encoders.h"
#include "readout.h"

namespace pepview {

std::string_view to_string(Readout readout) {
  return readout == Readout::kSum ? "sum" : "mean";
}

Readout parse_readout(std::string_view text) {
  if (text == "mean")
    return Readout::kMean;
  if (text == "sum")
    return Readout::kSum;
  throw ConfigError("unknown readout '" + std::string(text) + "'");
}

GraphBatch batch_graphs(std::span<const ResidueGraph *const> graphs) {
  GraphBatch batch;
  batch.offsets.push_back(0);
  for (const ResidueGraph *g: graphs)
    batch.offsets.push_back(batch.offsets.back() + g->num_nodes);
  batch.num_nodes = batch.offsets.back();

  const auto width = graphs.empty() ? kNodeFeatureDim
                                    : graphs.front()->node_features.cols();
  batch.node_features.resize(batch.num_nodes, width);
  for (std::size_t b = 0; b < graphs.size(); ++b) {
    const ResidueGraph &g = *graphs[b];
    if (g.node_features.cols() != width)
      throw ConfigError("graphs in a batch have different feature widths");
    const int offset = batch.offsets[b];
    batch.node_features.middleRows(offset, g.num_nodes) = g.node_features;
    // Graph edges are sorted by (type, src, dst), so each per-type list
    // stays sorted by (src, dst) after the offset shift.
    for (const Edge &e: g.edges)
      batch.edges[static_cast<int>(e.type)].emplace_back(e.src + offset,
                                                         e.dst + offset);
  }
  return batch;
}

GraphBatch batch_graphs(const ResidueGraph &graph) {
  const ResidueGraph *one[] = { &graph };
  return batch_graphs(one);
}

RgcnLayer::RgcnLayer(int hidden, Rng &rng): norm(hidden) {
  for (auto &w: kernels)
    w = Parameter(glorot(hidden, hidden, rng));
}

void RgcnLayer::collect(const std::string &prefix,
                        std::vector<NamedParameter> &out) {
  for (int r = 0; r < kNumEdgeTypes; ++r)
    out.push_back(
        { prefix + "/kernel_"
              + std::string(to_string(static_cast<EdgeType>(r))),
          &kernels[r] });
  norm.collect(prefix + "/bn", out);
}

Matrix rgcn_layer_forward(const Matrix &h, const GraphBatch &graph,
                          RgcnLayer &layer, Mode mode, RgcnCache *cache) {
  const auto width = layer.kernels[0].value.rows();
  if (h.rows() != graph.num_nodes || h.cols() != width)
    throw ConfigError("rgcn input " + shape_string(h) + " does not match "
                      + std::to_string(graph.num_nodes) + " nodes x "
                      + std::to_string(width));

  RgcnCache local;
  RgcnCache &c = cache ? *cache : local;

  Matrix message = Matrix::Zero(h.rows(), layer.kernels[0].value.cols());
  for (int r = 0; r < kNumEdgeTypes; ++r) {
    Matrix &agg = c.aggregates[r];
    agg = Matrix::Zero(h.rows(), h.cols());
    for (const auto &[src, dst]: graph.edges[r])
      agg.row(dst) += h.row(src);
    message.noalias() += agg * layer.kernels[r].value;
  }

  c.normalized = layer.norm.forward(message, mode, &c.norm);
  return h + relu_forward(c.normalized);
}

Matrix rgcn_layer_backward(const Matrix &dout, const GraphBatch &graph,
                           RgcnLayer &layer, const RgcnCache &cache) {
  const Matrix dmessage =
      layer.norm.backward(cache.norm, relu_backward(cache.normalized, dout));

  Matrix dh = dout;
  for (int r = 0; r < kNumEdgeTypes; ++r) {
    layer.kernels[r].grad.noalias() +=
        cache.aggregates[r].transpose() * dmessage;
    const Matrix dagg = dmessage * layer.kernels[r].value.transpose();
    for (const auto &[src, dst]: graph.edges[r])
      dh.row(src) += dagg.row(dst);
  }
  return dh;
}

StructureEncoder::StructureEncoder(const StructureEncoderConfig &config,
                                   Rng &rng)
    : input_projection(config.input_dim, config.hidden, rng),
      config_(config) {
  if (config.hidden < 1 || config.layers < 0)
    throw ConfigError("structure encoder needs hidden >= 1 and layers >= 0");
  for (int l = 0; l < config.layers; ++l)
    layers.emplace_back(config.hidden, rng);
}

EncoderOutput StructureEncoder::forward(const GraphBatch &graph, Mode mode,
                                        Cache *cache) {
  if (graph.node_features.cols() != input_projection.in_features())
    throw ConfigError("node feature width "
                      + std::to_string(graph.node_features.cols())
                      + " does not match encoder input width "
                      + std::to_string(input_projection.in_features()));

  Cache local;
  Cache &c = cache ? *cache : local;
  c.input = graph.node_features;
  c.layer_inputs.clear();
  c.layers.assign(layers.size(), {});

  Matrix h = input_projection.forward(graph.node_features);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    c.layer_inputs.push_back(h);
    h = rgcn_layer_forward(h, graph, layers[l], mode, &c.layers[l]);
  }

  Matrix pooled = internal::pool(h, graph.offsets, config_.readout);
  return { std::move(h), std::move(pooled) };
}

Matrix StructureEncoder::backward(const GraphBatch &graph, const Cache &cache,
                                  const Matrix &d_residues,
                                  const Matrix &d_pooled) {
  Matrix dh = Matrix::Zero(graph.num_nodes, config_.hidden);
  if (d_residues.size() > 0)
    dh += d_residues;
  if (d_pooled.size() > 0)
    internal::pool_backward(d_pooled, graph.offsets, config_.readout, dh);

  for (std::size_t l = layers.size(); l-- > 0;)
    dh = rgcn_layer_backward(dh, graph, layers[l], cache.layers[l]);
  return input_projection.backward(cache.input, dh);
}

void StructureEncoder::collect(const std::string &prefix,
                               std::vector<NamedParameter> &out) {
  input_projection.collect(prefix + "/input", out);
  for (std::size_t l = 0; l < layers.size(); ++l)
    layers[l].collect(prefix + "/layer" + std::to_string(l), out);
}

void StructureEncoder::collect_buffers(const std::string &prefix,
                                       std::vector<NamedBuffer> &out) {
  for (std::size_t l = 0; l < layers.size(); ++l)
    layers[l].norm.collect_buffers(prefix + "/layer" + std::to_string(l) + "/bn",
                                   out);
}

}  // namespace pepview
