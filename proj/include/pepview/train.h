//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_TRAIN_H_
#define PEPVIEW_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pepview/container.h"
#include "pepview/encoders.h"
#include "pepview/graphs.h"
#include "pepview/ingest.h"
#include "pepview/nn.h"
#include "pepview/ssl.h"

namespace pepview {

struct ModelConfig {
  int hidden = 64;
  int structure_layers = 3;
  int sequence_blocks = 2;
  int heads = 4;
  Readout readout = Readout::kMean;
  VrrConfig vrr;
};

/// Every learnable tensor of the two-view model: sequence transformer,
/// relational structure encoder and the generative heads.
class PeptideModel {
public:
  PeptideModel(const ModelConfig &config, std::uint64_t seed);

  const ModelConfig &config() const { return config_; }

  std::vector<NamedParameter> parameters();
  std::vector<NamedBuffer> buffers();

  SequenceEncoder sequence;
  StructureEncoder structure;
  VrrHeads vrr;

private:
  PeptideModel(const ModelConfig &config, Rng &&rng);

  ModelConfig config_;
};

/// Activations kept between encode_pair_batch and backward_pair_batch.
struct PairForward {
  std::vector<SequenceEncoder::Cache> sequence;
  GraphBatch graphs;
  StructureEncoder::Cache structure;
};

EmbeddingBatch encode_pair_batch(PeptideModel &model,
                                 std::span<const PeptideRecord *const> records,
                                 std::span<const ResidueGraph *const> graphs,
                                 Mode mode, PairForward *state = nullptr);
void backward_pair_batch(PeptideModel &model, const PairForward &state,
                         const Matrix &d_hx, const Matrix &d_hy);

// Pooled sequence-view embeddings (frozen encoder), one row per record.
Matrix embed_sequences(const PeptideModel &model,
                       std::span<const PeptideRecord> records);

enum class BatchStrategy { kRandom, kLengthSorted };

std::string_view to_string(BatchStrategy strategy);
BatchStrategy parse_batch_strategy(std::string_view text);

/// Chunks record indices into batches. kLengthSorted stable-sorts by
/// (length, id) first; kRandom applies a seeded shuffle. The final short
/// batch is kept.
std::vector<std::vector<std::size_t>> make_batch_indices(
    std::span<const PeptideRecord> records, std::size_t batch_size,
    BatchStrategy strategy, std::uint64_t seed);

std::vector<std::vector<std::string>> make_batches(
    std::span<const PeptideRecord> records, std::size_t batch_size,
    BatchStrategy strategy, std::uint64_t seed);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamMoments {
  Matrix m;
  Matrix v;
};

// One bias-corrected Adam update of `value` at step t (1-based).
void adam_update(Matrix &value, const Matrix &grad, AdamMoments &moments,
                 long t, const AdamConfig &config);

/// Adam over a named parameter list, state keyed by parameter name.
class Adam {
public:
  explicit Adam(AdamConfig config = {}): config_(config) { }

  // Rejects the whole step with NumericError if any gradient is not finite.
  void step(std::span<const NamedParameter> params);

  long steps() const { return t_; }
  const AdamConfig &config() const { return config_; }

private:
  AdamConfig config_;
  std::map<std::string, AdamMoments, std::less<>> moments_;
  long t_ = 0;
};

// Rescales gradients so their global L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_grad_norm(std::span<const NamedParameter> params, double max_norm);

struct TrainConfig {
  int batch_size = 16;
  int epochs = 10;
  AdamConfig adam;
  BatchStrategy strategy = BatchStrategy::kRandom;
  std::uint64_t seed = 0;
  SslConfig ssl;
  double clip_norm = 5.0;
  ModelConfig model;

  void validate() const;
};

nlohmann::ordered_json to_json(const ModelConfig &config);
nlohmann::ordered_json to_json(const TrainConfig &config);
nlohmann::ordered_json to_json(const GraphConfig &config);
ModelConfig model_config_from_json(const nlohmann::ordered_json &j);
TrainConfig train_config_from_json(const nlohmann::ordered_json &j);
GraphConfig graph_config_from_json(const nlohmann::ordered_json &j);

struct StepLog {
  long step = 0;
  int epoch = 0;
  double loss = 0;
  std::optional<double> infonce;
  std::optional<double> vrr;
  double match_acc = 0;

  // {"step", "loss", "infonce"?, "vrr"?, "match_acc"}; absent losses are
  // omitted rather than written as null.
  std::string to_json_line() const;
};

struct Checkpoint {
  PeptideModel model;
  TrainConfig train;
  GraphConfig graph;
  std::string rng_state;
  long step = 0;
};

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<StepLog> log;
};

using StepCallback = std::function<void(const StepLog &)>;

/**
 * Two-view self-supervised pretraining.
 *
 * Each epoch reshuffles batch order from the seed, encodes both views of
 * every batch in train mode, applies the configured loss, clips the
 * global gradient norm and takes one Adam step. Every logged value is a
 * function of (records, configs, seed) alone.
 */
PretrainResult pretrain(std::span<const PeptideRecord> records,
                        const TrainConfig &train, const GraphConfig &graph,
                        const StepCallback &on_step = {});

std::vector<ResidueGraph> build_graphs(std::span<const PeptideRecord> records,
                                       const GraphConfig &config);

/// Held-out in-batch matching accuracy with eval-mode encoders, averaged
/// over items.
double evaluate_matching(PeptideModel &model,
                         std::span<const PeptideRecord> records,
                         const GraphConfig &graph, std::size_t batch_size,
                         BatchStrategy strategy, std::uint64_t seed);

TensorContainer checkpoint_to_container(Checkpoint &checkpoint);
Checkpoint checkpoint_from_container(const TensorContainer &container);

void save_checkpoint(Checkpoint &checkpoint,
                     const std::filesystem::path &path);
Checkpoint load_checkpoint(const std::filesystem::path &path);

struct AblationRow {
  LossKind loss;
  BatchStrategy strategy;
  double matching_accuracy;
  double final_loss;
};

/// Trains every {contrastive, generative, both} x {length-sorted, random}
/// configuration from the same base settings and scores each on the same
/// held-out batches built with eval_strategy.
std::vector<AblationRow> run_ablation(std::span<const PeptideRecord> train,
                                      std::span<const PeptideRecord> test,
                                      const TrainConfig &base,
                                      const GraphConfig &graph,
                                      BatchStrategy eval_strategy);

std::string format_ablation_table(std::span<const AblationRow> rows);

}  // namespace pepview

#endif  // PEPVIEW_TRAIN_H_
