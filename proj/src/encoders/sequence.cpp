//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <string>

#include "pepview/core.h"
#include "pepview/encoders.h"
#include "pepview/ingest.h"
#include "readout.h"

namespace pepview {

std::vector<int> tokenize(std::string_view sequence) {
  std::vector<int> tokens;
  tokens.reserve(sequence.size());
  for (char c: sequence) {
    const int t = residue_index(c);
    if (t < 0)
      throw DataError(std::string("unknown residue token '") + c + "'");
    tokens.push_back(t);
  }
  return tokens;
}

Matrix sinusoidal_encoding(int length, int dim) {
  Matrix pe(length, dim);
  for (int pos = 0; pos < length; ++pos)
    for (int i = 0; i < dim; ++i) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(i - i % 2) / dim);
      pe(pos, i) = i % 2 == 0 ? std::sin(pos * freq) : std::cos(pos * freq);
    }
  return pe;
}

TransformerBlock::TransformerBlock(int hidden, int heads, Rng &rng)
    : heads(heads), norm1(hidden), query(hidden, hidden, rng),
      key(hidden, hidden, rng), value(hidden, hidden, rng),
      output(hidden, hidden, rng), norm2(hidden),
      ff1(hidden, 4 * hidden, rng), ff2(4 * hidden, hidden, rng) {
  if (heads < 1 || hidden % heads != 0)
    throw ConfigError("hidden width " + std::to_string(hidden)
                      + " is not divisible by " + std::to_string(heads)
                      + " heads");
}

void TransformerBlock::collect(const std::string &prefix,
                               std::vector<NamedParameter> &out) {
  norm1.collect(prefix + "/ln1", out);
  query.collect(prefix + "/query", out);
  key.collect(prefix + "/key", out);
  value.collect(prefix + "/value", out);
  output.collect(prefix + "/attn_out", out);
  norm2.collect(prefix + "/ln2", out);
  ff1.collect(prefix + "/ff1", out);
  ff2.collect(prefix + "/ff2", out);
}

Matrix transformer_block_forward(const TransformerBlock &block,
                                 const Matrix &x,
                                 TransformerBlockCache *cache) {
  TransformerBlockCache local;
  TransformerBlockCache &c = cache ? *cache : local;

  const auto hidden = x.cols();
  const auto head_dim = hidden / block.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  c.normed1 = block.norm1.forward(x, &c.norm1);
  c.q = block.query.forward(c.normed1);
  c.k = block.key.forward(c.normed1);
  c.v = block.value.forward(c.normed1);

  c.attention.resize(block.heads);
  c.context.resize(x.rows(), hidden);
  for (int h = 0; h < block.heads; ++h) {
    const auto cols = h * head_dim;
    c.attention[h] = softmax_rows(
        (c.q.middleCols(cols, head_dim) * c.k.middleCols(cols, head_dim).transpose())
        * scale);
    c.context.middleCols(cols, head_dim) =
        c.attention[h] * c.v.middleCols(cols, head_dim);
  }
  c.mid = x + block.output.forward(c.context);

  c.normed2 = block.norm2.forward(c.mid, &c.norm2);
  c.ff_pre = block.ff1.forward(c.normed2);
  c.ff_act = relu_forward(c.ff_pre);
  return c.mid + block.ff2.forward(c.ff_act);
}

Matrix transformer_block_backward(TransformerBlock &block,
                                  const TransformerBlockCache &c,
                                  const Matrix &dout) {
  const auto hidden = dout.cols();
  const auto head_dim = hidden / block.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  Matrix dmid = dout;
  const Matrix dact = block.ff2.backward(c.ff_act, dout);
  const Matrix dnormed2 =
      block.ff1.backward(c.normed2, relu_backward(c.ff_pre, dact));
  dmid += block.norm2.backward(c.norm2, dnormed2);

  const Matrix dcontext = block.output.backward(c.context, dmid);
  Matrix dq(dout.rows(), hidden), dk(dout.rows(), hidden),
      dv(dout.rows(), hidden);
  for (int h = 0; h < block.heads; ++h) {
    const auto cols = h * head_dim;
    const Matrix &probs = c.attention[h];
    const auto dctx = dcontext.middleCols(cols, head_dim);
    dv.middleCols(cols, head_dim) = probs.transpose() * dctx;
    const Matrix dscores =
        softmax_rows_backward(probs,
                              dctx * c.v.middleCols(cols, head_dim).transpose())
        * scale;
    dq.middleCols(cols, head_dim) = dscores * c.k.middleCols(cols, head_dim);
    dk.middleCols(cols, head_dim) =
        dscores.transpose() * c.q.middleCols(cols, head_dim);
  }

  Matrix dnormed1 = block.query.backward(c.normed1, dq);
  dnormed1 += block.key.backward(c.normed1, dk);
  dnormed1 += block.value.backward(c.normed1, dv);
  return dmid + block.norm1.backward(c.norm1, dnormed1);
}

SequenceEncoder::SequenceEncoder(const SequenceEncoderConfig &config,
                                 Rng &rng)
    : token_embedding(glorot(kNumResidueTypes, config.hidden, rng)),
      final_norm(config.hidden), config_(config) {
  if (config.blocks < 0)
    throw ConfigError("sequence encoder needs blocks >= 0");
  for (int b = 0; b < config.blocks; ++b)
    blocks.emplace_back(config.hidden, config.heads, rng);
}

EncoderOutput SequenceEncoder::forward(std::span<const int> tokens,
                                       Cache *cache) const {
  const int n = static_cast<int>(tokens.size());
  if (n == 0)
    throw DataError("cannot encode an empty sequence");

  Cache local;
  Cache &c = cache ? *cache : local;
  c.tokens.assign(tokens.begin(), tokens.end());
  c.block_inputs.clear();
  c.blocks.assign(blocks.size(), {});

  Matrix x = sinusoidal_encoding(n, config_.hidden);
  for (int i = 0; i < n; ++i) {
    if (tokens[i] < 0 || tokens[i] >= kNumResidueTypes)
      throw DataError("token " + std::to_string(tokens[i])
                      + " outside the residue vocabulary");
    x.row(i) += token_embedding.value.row(tokens[i]);
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    c.block_inputs.push_back(x);
    x = transformer_block_forward(blocks[b], x, &c.blocks[b]);
  }
  c.block_inputs.push_back(x);

  Matrix residues = final_norm.forward(x, &c.final_norm);
  Matrix pooled = internal::pool(residues, { 0, n }, config_.readout);
  return { std::move(residues), std::move(pooled) };
}

void SequenceEncoder::backward(const Cache &cache, const Matrix &d_residues,
                               const Matrix &d_pooled) {
  const int n = static_cast<int>(cache.tokens.size());
  Matrix dres = Matrix::Zero(n, config_.hidden);
  if (d_residues.size() > 0)
    dres += d_residues;
  if (d_pooled.size() > 0)
    internal::pool_backward(d_pooled, { 0, n }, config_.readout, dres);

  Matrix dx = final_norm.backward(cache.final_norm, dres);
  for (std::size_t b = blocks.size(); b-- > 0;)
    dx = transformer_block_backward(blocks[b], cache.blocks[b], dx);

  for (int i = 0; i < n; ++i)
    token_embedding.grad.row(cache.tokens[i]) += dx.row(i);
}

void SequenceEncoder::collect(const std::string &prefix,
                              std::vector<NamedParameter> &out) {
  out.push_back({ prefix + "/token_embedding", &token_embedding });
  for (std::size_t b = 0; b < blocks.size(); ++b)
    blocks[b].collect(prefix + "/block" + std::to_string(b), out);
  final_norm.collect(prefix + "/ln_final", out);
}

}  // namespace pepview
