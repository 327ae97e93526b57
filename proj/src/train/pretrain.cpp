//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_set>

#include "pepview/core.h"
#include "pepview/train.h"

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;

// Stream indices for derive_seed so the independent random streams of a
// run never overlap.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSamplingStream = 1;
constexpr std::uint64_t kEpochStreamBase = 1000;

std::vector<const PeptideRecord *> gather(std::span<const PeptideRecord> all,
                                          const std::vector<std::size_t> &idx) {
  std::vector<const PeptideRecord *> out;
  for (std::size_t i: idx)
    out.push_back(&all[i]);
  return out;
}

std::vector<const ResidueGraph *> gather(std::span<const ResidueGraph> all,
                                         const std::vector<std::size_t> &idx) {
  std::vector<const ResidueGraph *> out;
  for (std::size_t i: idx)
    out.push_back(&all[i]);
  return out;
}
}  // namespace

std::string StepLog::to_json_line() const {
  ojson j;
  j["step"] = step;
  j["loss"] = loss;
  if (infonce)
    j["infonce"] = *infonce;
  if (vrr)
    j["vrr"] = *vrr;
  j["match_acc"] = match_acc;
  return j.dump();
}

std::vector<ResidueGraph> build_graphs(std::span<const PeptideRecord> records,
                                       const GraphConfig &config) {
  std::vector<ResidueGraph> graphs;
  graphs.reserve(records.size());
  for (const auto &r: records)
    graphs.push_back(build_residue_graph(r, config));
  return graphs;
}

PretrainResult pretrain(std::span<const PeptideRecord> records,
                        const TrainConfig &train, const GraphConfig &graph,
                        const StepCallback &on_step) {
  train.validate();
  graph.validate();
  if (records.empty())
    throw DataError("pretraining needs at least one record");

  std::unordered_set<std::string> ids;
  for (const auto &r: records)
    if (!ids.insert(r.id).second)
      throw DataError("duplicate record id '" + r.id + "'");

  const std::vector<ResidueGraph> graphs = build_graphs(records, graph);

  PretrainResult result {
    Checkpoint { PeptideModel(train.model, derive_seed(train.seed, kInitStream)),
                 train, graph, {}, 0 },
    {},
  };
  PeptideModel &model = result.checkpoint.model;
  std::vector<NamedParameter> params = model.parameters();
  Adam adam(train.adam);
  Rng sampling(derive_seed(train.seed, kSamplingStream));

  const auto batch_size = static_cast<std::size_t>(train.batch_size);
  const auto fixed_batches = make_batch_indices(
      records, batch_size, BatchStrategy::kLengthSorted, train.seed);

  long step = 0;
  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    const std::uint64_t epoch_seed =
        derive_seed(train.seed, kEpochStreamBase + epoch);
    std::vector<std::vector<std::size_t>> batches;
    if (train.strategy == BatchStrategy::kLengthSorted) {
      // Batch membership is fixed by length; only the visiting order varies.
      batches = fixed_batches;
      Rng order(epoch_seed);
      order.shuffle(batches);
    } else {
      batches = make_batch_indices(records, batch_size, train.strategy,
                                   epoch_seed);
    }

    for (const auto &batch: batches) {
      try {
        zero_grads(params);
        const auto batch_records = gather(records, batch);
        const auto batch_graphs = gather(std::span(graphs), batch);

        PairForward state;
        EmbeddingBatch emb = encode_pair_batch(model, batch_records,
                                               batch_graphs, Mode::kTrain,
                                               &state);

        StepLog log;
        log.step = step;
        log.epoch = epoch;
        Matrix d_hx = Matrix::Zero(emb.h_x.rows(), emb.h_x.cols());
        Matrix d_hy = Matrix::Zero(emb.h_y.rows(), emb.h_y.cols());

        if (train.ssl.uses_contrastive()) {
          InfoNceResult nce =
              infonce_loss(emb.h_x, emb.h_y, train.ssl.temperature);
          log.infonce = nce.loss;
          log.loss += nce.loss;
          d_hx += nce.d_hx;
          d_hy += nce.d_hy;
        }
        if (train.ssl.uses_generative()) {
          const double weight = train.ssl.loss == LossKind::kBoth
                                    ? train.ssl.generative_weight
                                    : 1.0;
          // vrr_loss accumulates unit-weight head gradients; rescale them
          // together with the embedding gradients.
          std::vector<NamedParameter> heads;
          model.vrr.collect("vrr", heads);
          VrrResult vrr = vrr_loss(emb.h_x, emb.h_y, model.vrr, sampling);
          if (weight != 1.0)
            for (auto &p: heads)
              p.param->grad *= weight;
          log.vrr = vrr.loss;
          log.loss += weight * vrr.loss;
          d_hx += weight * vrr.d_hx;
          d_hy += weight * vrr.d_hy;
        }
        if (!std::isfinite(log.loss))
          throw NumericError("non-finite loss");

        log.match_acc = matching_accuracy(emb.h_x, emb.h_y).mean;
        backward_pair_batch(model, state, d_hx, d_hy);
        clip_grad_norm(params, train.clip_norm);
        adam.step(params);

        result.log.push_back(log);
        if (on_step)
          on_step(log);
        ++step;
      } catch (const NumericError &e) {
        throw NumericError("step " + std::to_string(step) + ": " + e.what());
      } catch (const DataError &e) {
        throw DataError("step " + std::to_string(step) + ": " + e.what());
      } catch (const ConfigError &e) {
        throw ConfigError("step " + std::to_string(step) + ": " + e.what());
      }
    }
  }

  result.checkpoint.step = step;
  result.checkpoint.rng_state = sampling.state();
  return result;
}

double evaluate_matching(PeptideModel &model,
                         std::span<const PeptideRecord> records,
                         const GraphConfig &graph, std::size_t batch_size,
                         BatchStrategy strategy, std::uint64_t seed) {
  if (records.empty())
    return 0;
  const std::vector<ResidueGraph> graphs = build_graphs(records, graph);

  double hits = 0;
  for (const auto &batch:
       make_batch_indices(records, batch_size, strategy, seed)) {
    EmbeddingBatch emb =
        encode_pair_batch(model, gather(records, batch),
                          gather(std::span(graphs), batch), Mode::kEval);
    hits += matching_accuracy(emb.h_x, emb.h_y).mean
            * static_cast<double>(batch.size());
  }
  return hits / static_cast<double>(records.size());
}

std::vector<AblationRow> run_ablation(std::span<const PeptideRecord> train,
                                      std::span<const PeptideRecord> test,
                                      const TrainConfig &base,
                                      const GraphConfig &graph,
                                      BatchStrategy eval_strategy) {
  std::vector<AblationRow> rows;
  for (LossKind loss:
       { LossKind::kContrastive, LossKind::kGenerative, LossKind::kBoth })
    for (BatchStrategy strategy:
         { BatchStrategy::kLengthSorted, BatchStrategy::kRandom }) {
      TrainConfig config = base;
      config.ssl.loss = loss;
      config.strategy = strategy;
      PretrainResult run = pretrain(train, config, graph);
      const double acc = evaluate_matching(
          run.checkpoint.model, test, graph,
          static_cast<std::size_t>(base.batch_size), eval_strategy,
          base.seed);
      rows.push_back({ loss, strategy, acc,
                       run.log.empty() ? 0.0 : run.log.back().loss });
    }
  return rows;
}

std::string format_ablation_table(std::span<const AblationRow> rows) {
  std::ostringstream os;
  os << "| loss        | batching      | match_acc | final_loss |\n"
     << "|-------------|---------------|-----------|------------|\n";
  os << std::fixed;
  for (const auto &r: rows)
    os << "| " << std::left << std::setw(11) << to_string(r.loss) << " | "
       << std::setw(13) << to_string(r.strategy) << " | " << std::right
       << std::setprecision(4) << std::setw(9) << r.matching_accuracy
       << " | " << std::setw(10) << r.final_loss << " |\n";
  return os.str();
}

}  // namespace pepview
