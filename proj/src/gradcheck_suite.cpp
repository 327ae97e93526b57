//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/gradcheck.h"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>

#include "pepview/encoders.h"
#include "pepview/graphs.h"
#include "pepview/ssl.h"

namespace pepview {
namespace {
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng,
                     double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = scale * rng.normal();
  return m;
}

// Normalizing over two values yields exactly +-1 whatever the inputs, which
// leaves true gradients at roundoff level. Normalized axes therefore get at
// least kMinNormalized entries.
constexpr int kMinNormalized = 3;

// Entries with magnitude in [0.1, 1.1) so ReLU kinks sit far from every
// finite-difference probe.
Matrix away_from_zero(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = (rng.uniform() < 0.5 ? -1 : 1) * (0.1 + rng.uniform());
  return m;
}

int between(Rng &rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::size_t>(hi - lo + 1)));
}

double projected(const Matrix &out, const Matrix &weights) {
  return (out.array() * weights.array()).sum();
}

GraphBatch random_graph_batch(Rng &rng, int graphs, int max_nodes,
                              int width) {
  std::vector<ResidueGraph> storage;
  for (int g = 0; g < graphs; ++g) {
    PeptideRecord r;
    r.id = "g" + std::to_string(g);
    const int n = between(rng, kMinNormalized, max_nodes);
    for (int i = 0; i < n; ++i) {
      r.sequence.push_back(kResidueAlphabet[rng.below(kNumResidueTypes)]);
      r.coords.push_back({ rng.uniform(0, 8), rng.uniform(0, 8), rng.uniform(0, 8) });
    }
    GraphConfig cfg { rng.uniform(3.0, 9.0), between(rng, 1, 3), false };
    storage.push_back(build_residue_graph(r, cfg));
  }
  std::vector<const ResidueGraph *> ptrs;
  for (const auto &g: storage)
    ptrs.push_back(&g);
  GraphBatch batch = batch_graphs(ptrs);
  batch.node_features = random_matrix(batch.num_nodes, width, rng);
  return batch;
}

// Central differences straddling a ReLU kink measure the kink, not the
// backward pass; configurations with a pre-activation this close to zero
// are redrawn.
constexpr double kKinkMargin = 1e-3;

bool near_kink(const Matrix &pre) {
  return pre.size() > 0 && pre.cwiseAbs().minCoeff() < kKinkMargin;
}

// one() returns nullopt for a rejected configuration.
template <class Fn>
GradCheckRow repeat(const std::string &name, int configurations,
                    double tolerance, Rng &rng, Fn &&one) {
  GradCheckRow row { name, configurations, 0.0, tolerance };
  int accepted = 0;
  for (int tries = 0; accepted < configurations; ++tries) {
    if (tries > 100 * configurations)
      throw NumericError("gradcheck " + name
                         + ": could not draw a configuration away from kinks");
    const std::optional<double> err = one(rng);
    if (!err)
      continue;
    row.worst_error = std::max(row.worst_error, *err);
    ++accepted;
  }
  return row;
}

std::optional<double> unless(bool reject, double err) {
  if (reject)
    return std::nullopt;
  return err;
}
}  // namespace

double check_gradients(std::span<const NamedParameter> params,
                       const std::function<double()> &loss,
                       const std::function<void()> &backward, double eps) {
  const std::vector<double> original = flatten_values(params);
  // Some objectives accumulate into parameter grads during the forward
  // pass, so grads are cleared only after it.
  loss();
  zero_grads(params);
  backward();
  const std::vector<double> analytic = flatten_grads(params);

  auto f = [&](std::span<const double> theta) {
    assign_values(params, theta);
    return loss();
  };
  const double worst = finite_diff_check(f, original, analytic, eps);
  assign_values(params, original);
  return worst;
}

std::vector<GradCheckRow> run_gradcheck_suite(std::uint64_t seed,
                                              int configurations) {
  Rng rng(seed);
  std::vector<GradCheckRow> rows;

  rows.push_back(repeat("linear", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    const int b = between(r, 1, 5), din = between(r, 1, 6),
              dout = between(r, 1, 6);
    Parameter x(random_matrix(b, din, r));
    Linear layer(din, dout, r);
    layer.bias.value = random_matrix(1, dout, r);
    const Matrix w = random_matrix(b, dout, r);
    std::vector<NamedParameter> params { { "x", &x } };
    layer.collect("linear", params);
    return check_gradients(
        params, [&] { return projected(layer.forward(x.value), w); },
        [&] { x.grad += layer.backward(x.value, w); });
  }));

  rows.push_back(repeat("relu", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    Parameter x(away_from_zero(between(r, 1, 5), between(r, 1, 6), r));
    const Matrix w = random_matrix(x.value.rows(), x.value.cols(), r);
    std::vector<NamedParameter> params { { "x", &x } };
    return check_gradients(
        params, [&] { return projected(relu_forward(x.value), w); },
        [&] { x.grad += relu_backward(x.value, w); });
  }));

  rows.push_back(repeat("batchnorm", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    const int b = between(r, kMinNormalized, 6), d = between(r, 1, 5);
    Parameter x(random_matrix(b, d, r));
    BatchNorm bn(d);
    bn.gamma.value = random_matrix(1, d, r);
    bn.beta.value = random_matrix(1, d, r);
    const Matrix w = random_matrix(b, d, r);
    std::vector<NamedParameter> params { { "x", &x } };
    bn.collect("bn", params);
    NormCache cache;
    return check_gradients(
        params,
        [&] { return projected(bn.forward(x.value, Mode::kTrain, &cache), w); },
        [&] { x.grad += bn.backward(cache, w); });
  }));

  rows.push_back(repeat("layernorm", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    const int b = between(r, 1, 5), d = between(r, kMinNormalized, 6);
    Parameter x(random_matrix(b, d, r));
    LayerNorm ln(d);
    ln.gamma.value = random_matrix(1, d, r);
    ln.beta.value = random_matrix(1, d, r);
    const Matrix w = random_matrix(b, d, r);
    std::vector<NamedParameter> params { { "x", &x } };
    ln.collect("ln", params);
    NormCache cache;
    return check_gradients(
        params, [&] { return projected(ln.forward(x.value, &cache), w); },
        [&] { x.grad += ln.backward(cache, w); });
  }));

  rows.push_back(
      repeat("softmax_cross_entropy", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
        const int b = between(r, 1, 6), c = between(r, 2, 6);
        Parameter s(random_matrix(b, c, r, 2.0));
        std::vector<int> targets(b);
        for (auto &t: targets)
          t = static_cast<int>(r.below(c));
        std::vector<NamedParameter> params { { "scores", &s } };
        return check_gradients(
            params,
            [&] { return softmax_cross_entropy(s.value, targets).loss; },
            [&] { s.grad += softmax_cross_entropy(s.value, targets).dscores; });
      }));

  rows.push_back(
      repeat("transformer_block", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
        const int heads = between(r, 1, 2);
        const int hidden = heads * between(r, kMinNormalized, 4);
        const int n = between(r, 1, 5);
        TransformerBlock block(hidden, heads, r);
        Parameter x(random_matrix(n, hidden, r));
        const Matrix w = random_matrix(n, hidden, r);
        std::vector<NamedParameter> params { { "x", &x } };
        block.collect("block", params);
        TransformerBlockCache cache;
        const double err = check_gradients(
            params,
            [&] {
              return projected(
                  transformer_block_forward(block, x.value, &cache), w);
            },
            [&] { x.grad += transformer_block_backward(block, cache, w); });
        return unless(near_kink(cache.ff_pre), err);
      }));

  rows.push_back(
      repeat("sequence_encoder", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
        SequenceEncoderConfig cfg { 2 * between(r, 2, 3), 1, 2,
                                    Readout::kMean };
        SequenceEncoder enc(cfg, r);
        std::vector<int> tokens(3);
        for (auto &t: tokens)
          t = static_cast<int>(r.below(kNumResidueTypes));
        const Matrix w_res = random_matrix(3, cfg.hidden, r);
        const Matrix w_pool = random_matrix(1, cfg.hidden, r);
        std::vector<NamedParameter> params;
        enc.collect("seq", params);
        SequenceEncoder::Cache cache;
        const double err = check_gradients(
            params,
            [&] {
              const EncoderOutput out = enc.forward(tokens, &cache);
              return projected(out.residues, w_res)
                     + projected(out.pooled, w_pool);
            },
            [&] { enc.backward(cache, w_res, w_pool); });
        return unless(near_kink(cache.blocks.front().ff_pre), err);
      }));

  rows.push_back(repeat("rgcn_layer", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    const int width = between(r, 2, 4);
    const GraphBatch graph = random_graph_batch(r, between(r, 1, 2), 6, width);
    RgcnLayer layer(width, r);
    layer.norm.gamma.value = random_matrix(1, width, r);
    layer.norm.beta.value = random_matrix(1, width, r);
    Parameter h(graph.node_features);
    const Matrix w = random_matrix(graph.num_nodes, width, r);
    std::vector<NamedParameter> params { { "h", &h } };
    layer.collect("rgcn", params);
    RgcnCache cache;
    const double err = check_gradients(
        params,
        [&] {
          return projected(
              rgcn_layer_forward(h.value, graph, layer, Mode::kTrain, &cache),
              w);
        },
        [&] { h.grad += rgcn_layer_backward(w, graph, layer, cache); });
    return unless(near_kink(cache.normalized), err);
  }));

  rows.push_back(
      repeat("structure_encoder", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
        const GraphBatch graph =
            random_graph_batch(r, between(r, 2, 3), 8, kNodeFeatureDim);
        StructureEncoderConfig cfg { kNodeFeatureDim, between(r, 2, 4),
                                     between(r, 1, 2), Readout::kMean };
        StructureEncoder enc(cfg, r);
        // Batch norm over a handful of nodes leaves the pooled output
        // nearly flat in some weights; residue outputs enter the objective
        // too and batches span several graphs.
        const Matrix w_res = random_matrix(graph.num_nodes, cfg.hidden, r);
        const Matrix w_pool = random_matrix(graph.num_graphs(), cfg.hidden, r);
        std::vector<NamedParameter> params;
        enc.collect("structure", params);
        StructureEncoder::Cache cache;
        const double err = check_gradients(
            params,
            [&] {
              const EncoderOutput out = enc.forward(graph, Mode::kTrain, &cache);
              return projected(out.residues, w_res)
                     + projected(out.pooled, w_pool);
            },
            [&] { enc.backward(graph, cache, w_res, w_pool); });
        bool kink = false;
        for (const auto &layer: cache.layers)
          kink = kink || near_kink(layer.normalized);
        return unless(kink, err);
      }));

  rows.push_back(repeat("infonce", configurations, 1e-4, rng, [](Rng &r) -> std::optional<double> {
    const int b = between(r, 1, 8), d = between(r, 1, 16);
    Parameter hx(random_matrix(b, d, r, 0.7));
    Parameter hy(random_matrix(b, d, r, 0.7));
    const double tau = r.uniform(0.5, 2.0);
    std::vector<NamedParameter> params { { "h_x", &hx }, { "h_y", &hy } };
    return check_gradients(
        params, [&] { return infonce_loss(hx.value, hy.value, tau).loss; },
        [&] {
          InfoNceResult res = infonce_loss(hx.value, hy.value, tau);
          hx.grad += res.d_hx;
          hy.grad += res.d_hy;
        });
  }));

  rows.push_back(repeat("vrr", configurations, 1e-3, rng, [](Rng &r) -> std::optional<double> {
    const int b = between(r, 1, 6), d = between(r, 2, 6);
    VrrConfig cfg { between(r, 1, 4), r.uniform(0.0, 2.0), between(r, 1, 2) };
    VrrHeads heads(d, cfg, r);
    Parameter hx(random_matrix(b, d, r, 0.5));
    Parameter hy(random_matrix(b, d, r, 0.5));
    // Stop-gradient: targets are frozen copies while sources move.
    const Matrix target_x = hy.value, target_y = hx.value;
    const std::uint64_t sample_seed = r.next_u64();
    std::vector<NamedParameter> params { { "h_x", &hx }, { "h_y", &hy } };
    heads.collect("vrr", params);
    auto run = [&] {
      Rng sampler(sample_seed);
      return vrr_loss_with_targets(hx.value, hy.value, target_x, target_y,
                                   heads, sampler);
    };
    return check_gradients(
        params, [&] { return run().loss; },
        [&] {
          VrrResult res = run();
          hx.grad += res.d_hx;
          hy.grad += res.d_hy;
        });
  }));

  return rows;
}

std::string format_gradcheck_table(const std::vector<GradCheckRow> &rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %8s %12s %10s %6s\n", "check",
                "configs", "max_rel_err", "tolerance", "result");
  os << line;
  for (const auto &r: rows) {
    std::snprintf(line, sizeof(line), "%-24s %8d %12.3e %10.1e %6s\n",
                  r.name.c_str(), r.configurations, r.worst_error, r.tolerance,
                  r.passed() ? "PASS" : "FAIL");
    os << line;
  }
  return os.str();
}

}  // namespace pepview
