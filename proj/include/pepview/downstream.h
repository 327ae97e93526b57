//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_DOWNSTREAM_H_
#define PEPVIEW_DOWNSTREAM_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pepview/ingest.h"
#include "pepview/nn.h"
#include "pepview/train.h"

namespace pepview {

// Metric primitives. Scores at or above `threshold` count as positive.
double accuracy(std::span<const double> scores, std::span<const int> labels,
                double threshold = 0.5);
// 2PR / (P + R), zero when P + R = 0.
double f1_score(std::span<const double> scores, std::span<const int> labels,
                double threshold = 0.5);
// 1-based ranks, tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);
// Mann-Whitney estimate with average ranks; nullopt for a single class.
std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const int> labels);
double rmse(std::span<const double> predictions,
            std::span<const double> targets);
// nullopt when either input has zero variance or fewer than 2 entries.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);
std::optional<double> spearman(std::span<const double> x,
                               std::span<const double> y);

// Cα contacts: distance < threshold and |i - j| >= min_sep.
Matrix self_contact_targets(const PeptideRecord &record,
                            double threshold = 8.0, int min_sep = 3);

enum class TaskKind { kBinary, kRegression, kSelfContact };

struct TaskSpec {
  std::string name;
  TaskKind kind;
  // Manifest label key; empty for self-contact, whose targets come from
  // coordinates.
  std::string label_key;
};

// cpp, solubility, affinity or contact.
TaskSpec task_spec(std::string_view name);

struct HeadConfig {
  int steps = 500;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  double contact_threshold = 8.0;
  int min_sep = 3;
};

nlohmann::ordered_json to_json(const HeadConfig &config);

/// Linear D -> 1 head; binary heads apply a sigmoid to the output.
struct VectorHead {
  TaskKind kind = TaskKind::kBinary;
  Linear layer;

  std::vector<double> predict(const Matrix &features) const;
};

/// Pairwise scorer s_ij = h_i W_s h_j^T + b with W_s = (W + W^T) / 2, so
/// the score matrix is symmetric for any input.
struct ContactHead {
  Parameter weight;
  Parameter bias;

  Matrix logits(const Matrix &residues) const;
  Matrix probabilities(const Matrix &residues) const;
};

// Full-batch Adam on binary cross-entropy or mean squared error.
VectorHead train_vector_head(TaskKind kind, const Matrix &features,
                             std::span<const double> labels,
                             const HeadConfig &config);

// Elementwise binary cross-entropy over pairs with |i - j| >= min_sep.
ContactHead train_contact_head(std::span<const Matrix> residues,
                               std::span<const Matrix> targets,
                               const HeadConfig &config);

struct MetricsReport {
  std::string task;
  std::vector<std::pair<std::string, std::optional<double>>> metrics;
  std::size_t n_samples = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();

  std::optional<double> metric(std::string_view name) const;
  nlohmann::ordered_json to_json() const;
};

MetricsReport evaluate_binary(std::string task, std::span<const double> scores,
                              std::span<const double> labels);
MetricsReport evaluate_regression(std::string task,
                                  std::span<const double> predictions,
                                  std::span<const double> targets);
// Pools all valid pairs (i < j, |i - j| >= min_sep) across peptides.
MetricsReport evaluate_contacts(std::string task,
                                std::span<const Matrix> probabilities,
                                std::span<const Matrix> targets, int min_sep);

/**
 * Trains a head on the frozen sequence encoder's train-split embeddings and
 * scores it on the test split (valid split when no test records exist).
 * Throws DataError naming the key and ids of records lacking labels.
 */
MetricsReport run_task(const TaskSpec &task, const PeptideModel &model,
                       std::span<const PeptideRecord> records,
                       const HeadConfig &config);

// {"id", "vector"} JSONL of pooled sequence embeddings.
std::string embedding_table(const PeptideModel &model,
                            std::span<const PeptideRecord> records);
void write_embeddings(const PeptideModel &model,
                      std::span<const PeptideRecord> records,
                      const std::filesystem::path &path);

}  // namespace pepview

#endif  // PEPVIEW_DOWNSTREAM_H_
