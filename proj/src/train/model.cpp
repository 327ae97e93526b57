//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <string>

#include "pepview/core.h"
#include "pepview/train.h"

namespace pepview {
namespace {
SequenceEncoderConfig sequence_config(const ModelConfig &c) {
  return { c.hidden, c.sequence_blocks, c.heads, c.readout };
}

StructureEncoderConfig structure_config(const ModelConfig &c) {
  return { kNodeFeatureDim, c.hidden, c.structure_layers, c.readout };
}

}  // namespace

PeptideModel::PeptideModel(const ModelConfig &config, std::uint64_t seed)
    : PeptideModel(config, Rng(seed)) { }

PeptideModel::PeptideModel(const ModelConfig &config, Rng &&rng)
    : sequence(sequence_config(config), rng),
      structure(structure_config(config), rng),
      vrr(config.hidden, config.vrr, rng), config_(config) { }

std::vector<NamedParameter> PeptideModel::parameters() {
  std::vector<NamedParameter> out;
  sequence.collect("sequence", out);
  structure.collect("structure", out);
  vrr.collect("vrr", out);
  return out;
}

std::vector<NamedBuffer> PeptideModel::buffers() {
  std::vector<NamedBuffer> out;
  structure.collect_buffers("structure", out);
  return out;
}

EmbeddingBatch encode_pair_batch(PeptideModel &model,
                                 std::span<const PeptideRecord *const> records,
                                 std::span<const ResidueGraph *const> graphs,
                                 Mode mode, PairForward *state) {
  if (records.size() != graphs.size())
    throw ConfigError("records and graphs differ in count");

  PairForward local;
  PairForward &s = state ? *state : local;
  const auto batch = static_cast<Eigen::Index>(records.size());
  const int hidden = model.config().hidden;

  EmbeddingBatch out;
  out.h_x.resize(batch, hidden);
  s.sequence.assign(records.size(), {});
  for (Eigen::Index b = 0; b < batch; ++b) {
    const PeptideRecord &r = *records[b];
    EncoderOutput seq =
        model.sequence.forward(tokenize(r.sequence), &s.sequence[b]);
    out.h_x.row(b) = seq.pooled.row(0);
    out.residues_x.push_back(std::move(seq.residues));
    out.ids.push_back(r.id);
  }

  s.graphs = batch_graphs(graphs);
  if (mode == Mode::kTrain && s.graphs.num_nodes < 2)
    throw DataError("batch has fewer than 2 residues; batch norm needs 2");
  out.h_y = model.structure.forward(s.graphs, mode, &s.structure).pooled;
  return out;
}

void backward_pair_batch(PeptideModel &model, const PairForward &state,
                         const Matrix &d_hx, const Matrix &d_hy) {
  const Matrix none;
  for (std::size_t b = 0; b < state.sequence.size(); ++b)
    model.sequence.backward(state.sequence[b], none,
                            d_hx.row(static_cast<Eigen::Index>(b)));
  model.structure.backward(state.graphs, state.structure, none, d_hy);
}

Matrix embed_sequences(const PeptideModel &model,
                       std::span<const PeptideRecord> records) {
  Matrix out(static_cast<Eigen::Index>(records.size()), model.config().hidden);
  for (std::size_t i = 0; i < records.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        model.sequence.forward(tokenize(records[i].sequence)).pooled.row(0);
  return out;
}

}  // namespace pepview
