//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "pepview/core.h"
#include "pepview/downstream.h"

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

std::vector<int> as_classes(std::span<const double> labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (double v: labels)
    out.push_back(v >= 0.5 ? 1 : 0);
  return out;
}

std::optional<double> finite_or_null(std::optional<double> v) {
  return v && std::isfinite(*v) ? v : std::nullopt;
}
}  // namespace

TaskSpec task_spec(std::string_view name) {
  if (name == "cpp")
    return { "cpp", TaskKind::kBinary, "cpp" };
  if (name == "solubility")
    return { "solubility", TaskKind::kBinary, "solubility" };
  if (name == "affinity")
    return { "affinity", TaskKind::kRegression, "affinity" };
  if (name == "contact")
    return { "contact", TaskKind::kSelfContact, "" };
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

ojson to_json(const HeadConfig &c) {
  return { { "steps", c.steps },
           { "lr", c.lr },
           { "seed", c.seed },
           { "contact_threshold", c.contact_threshold },
           { "min_sep", c.min_sep } };
}

std::vector<double> VectorHead::predict(const Matrix &features) const {
  const Matrix out = layer.forward(features);
  std::vector<double> preds(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    preds[i] = kind == TaskKind::kBinary ? sigmoid(out(i, 0)) : out(i, 0);
  return preds;
}

Matrix ContactHead::logits(const Matrix &residues) const {
  const Matrix sym = 0.5 * (weight.value + weight.value.transpose());
  const Matrix raw = residues * sym * residues.transpose();
  // Equal in exact arithmetic; averaging removes the roundoff asymmetry.
  Matrix s = 0.5 * (raw + raw.transpose());
  s.array() += bias.value(0, 0);
  return s;
}

Matrix ContactHead::probabilities(const Matrix &residues) const {
  return logits(residues).unaryExpr([](double x) { return sigmoid(x); });
}

VectorHead train_vector_head(TaskKind kind, const Matrix &features,
                             std::span<const double> labels,
                             const HeadConfig &config) {
  if (kind == TaskKind::kSelfContact)
    throw ConfigError("self-contact tasks use train_contact_head");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw ConfigError("feature rows and labels differ in count");
  if (labels.empty())
    throw DataError("no training examples");

  Rng rng(config.seed);
  VectorHead head { kind, Linear(static_cast<int>(features.cols()), 1, rng) };
  std::vector<NamedParameter> params;
  head.layer.collect("head", params);
  Adam adam(AdamConfig { config.lr });

  const Eigen::Map<const Eigen::VectorXd> y(labels.data(),
                                            static_cast<Eigen::Index>(labels.size()));
  const double n = static_cast<double>(labels.size());
  for (int step = 0; step < config.steps; ++step) {
    zero_grads(params);
    const Matrix out = head.layer.forward(features);
    Matrix dout(out.rows(), 1);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      dout(i, 0) = kind == TaskKind::kBinary
                       ? (sigmoid(out(i, 0)) - y(i)) / n
                       : 2.0 * (out(i, 0) - y(i)) / n;
    head.layer.backward(features, dout);
    adam.step(params);
  }
  return head;
}

ContactHead train_contact_head(std::span<const Matrix> residues,
                               std::span<const Matrix> targets,
                               const HeadConfig &config) {
  if (residues.size() != targets.size())
    throw ConfigError("residue features and contact targets differ in count");
  if (residues.empty())
    throw DataError("no training examples");

  const auto dim = static_cast<int>(residues.front().cols());
  Rng rng(config.seed);
  ContactHead head { Parameter(glorot(dim, dim, rng)),
                     Parameter(Matrix::Zero(1, 1)) };
  std::vector<NamedParameter> params { { "contact/weight", &head.weight },
                                       { "contact/bias", &head.bias } };
  Adam adam(AdamConfig { config.lr });

  double pairs = 0;
  for (const Matrix &t: targets)
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      pairs += std::max<Eigen::Index>(0, t.rows() - i - config.min_sep);
  if (pairs == 0)
    throw DataError("no residue pairs satisfy the minimum separation");

  for (int step = 0; step < config.steps; ++step) {
    zero_grads(params);
    Matrix dsym = Matrix::Zero(dim, dim);
    for (std::size_t p = 0; p < residues.size(); ++p) {
      const Matrix &h = residues[p];
      const Matrix logits = head.logits(h);
      Matrix dlogits = Matrix::Zero(logits.rows(), logits.cols());
      for (Eigen::Index i = 0; i < logits.rows(); ++i)
        for (Eigen::Index j = i + config.min_sep; j < logits.cols(); ++j)
          dlogits(i, j) = (sigmoid(logits(i, j)) - targets[p](i, j)) / pairs;
      dsym.noalias() += h.transpose() * dlogits * h;
      head.bias.grad(0, 0) += dlogits.sum();
    }
    head.weight.grad += 0.5 * (dsym + dsym.transpose());
    adam.step(params);
  }
  return head;
}

std::optional<double> MetricsReport::metric(std::string_view name) const {
  for (const auto &[k, v]: metrics)
    if (k == name)
      return v;
  throw ConfigError("metric '" + std::string(name) + "' not in report");
}

ojson MetricsReport::to_json() const {
  ojson m = ojson::object();
  for (const auto &[k, v]: metrics)
    m[k] = v ? ojson(*v) : ojson(nullptr);
  return { { "task", task },
           { "metrics", m },
           { "n_samples", n_samples },
           { "config", config } };
}

MetricsReport evaluate_binary(std::string task, std::span<const double> scores,
                              std::span<const double> labels) {
  const std::vector<int> classes = as_classes(labels);
  MetricsReport r;
  r.task = std::move(task);
  r.n_samples = scores.size();
  r.metrics = { { "acc", accuracy(scores, classes) },
                { "f1", f1_score(scores, classes) },
                { "roc_auc", roc_auc(scores, classes) } };
  return r;
}

MetricsReport evaluate_regression(std::string task,
                                  std::span<const double> predictions,
                                  std::span<const double> targets) {
  MetricsReport r;
  r.task = std::move(task);
  r.n_samples = predictions.size();
  r.metrics = { { "rmse", rmse(predictions, targets) },
                { "pearson", finite_or_null(pearson(predictions, targets)) },
                { "spearman", finite_or_null(spearman(predictions, targets)) } };
  return r;
}

MetricsReport evaluate_contacts(std::string task,
                                std::span<const Matrix> probabilities,
                                std::span<const Matrix> targets, int min_sep) {
  if (probabilities.size() != targets.size())
    throw ConfigError("contact predictions and targets differ in count");
  std::vector<double> scores, labels;
  for (std::size_t p = 0; p < targets.size(); ++p)
    for (Eigen::Index i = 0; i < targets[p].rows(); ++i)
      for (Eigen::Index j = i + min_sep; j < targets[p].cols(); ++j) {
        scores.push_back(probabilities[p](i, j));
        labels.push_back(targets[p](i, j));
      }
  return evaluate_binary(std::move(task), scores, labels);
}

MetricsReport run_task(const TaskSpec &task, const PeptideModel &model,
                       std::span<const PeptideRecord> records,
                       const HeadConfig &config) {
  std::vector<PeptideRecord> train, test, valid;
  for (const auto &r: records)
    (r.split == Split::kTrain ? train : r.split == Split::kTest ? test : valid)
        .push_back(r);
  if (test.empty())
    test = std::move(valid);
  if (train.empty() || test.empty())
    throw DataError("task '" + task.name
                    + "' needs records in the train split and in the test "
                      "(or valid) split");

  if (!task.label_key.empty()) {
    std::string missing;
    int count = 0;
    for (const auto *set: { &train, &test })
      for (const auto &r: *set)
        if (!r.labels.contains(task.label_key)) {
          if (count++ < 10)
            missing += (missing.empty() ? "" : ", ") + r.id;
        }
    if (count > 0)
      throw DataError("missing label '" + task.label_key + "' for "
                      + std::to_string(count) + " record(s): " + missing
                      + (count > 10 ? ", ..." : ""));
  }

  auto labels_of = [&](const std::vector<PeptideRecord> &set) {
    std::vector<double> y;
    for (const auto &r: set)
      y.push_back(r.labels.at(task.label_key));
    return y;
  };

  MetricsReport report;
  if (task.kind == TaskKind::kSelfContact) {
    auto features = [&](const std::vector<PeptideRecord> &set) {
      std::vector<Matrix> out;
      for (const auto &r: set)
        out.push_back(model.sequence.forward(tokenize(r.sequence)).residues);
      return out;
    };
    auto contacts = [&](const std::vector<PeptideRecord> &set) {
      std::vector<Matrix> out;
      for (const auto &r: set)
        out.push_back(self_contact_targets(r, config.contact_threshold,
                                           config.min_sep));
      return out;
    };
    const ContactHead head =
        train_contact_head(features(train), contacts(train), config);
    std::vector<Matrix> probs;
    for (const Matrix &h: features(test))
      probs.push_back(head.probabilities(h));
    report =
        evaluate_contacts(task.name, probs, contacts(test), config.min_sep);
  } else {
    const VectorHead head = train_vector_head(
        task.kind, embed_sequences(model, train), labels_of(train), config);
    const std::vector<double> preds =
        head.predict(embed_sequences(model, test));
    report = task.kind == TaskKind::kBinary
                 ? evaluate_binary(task.name, preds, labels_of(test))
                 : evaluate_regression(task.name, preds, labels_of(test));
  }
  report.config = { { "head", to_json(config) },
                    { "train_records", train.size() },
                    { "test_records", test.size() } };
  return report;
}

std::string embedding_table(const PeptideModel &model,
                            std::span<const PeptideRecord> records) {
  std::set<std::string> seen;
  for (const auto &r: records)
    if (!seen.insert(r.id).second)
      throw DataError("id collision: '" + r.id + "' appears more than once");

  const Matrix emb = embed_sequences(model, records);
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    ojson row;
    row["id"] = records[i].id;
    const auto r = static_cast<Eigen::Index>(i);
    row["vector"] = std::vector<double>(emb.row(r).data(),
                                        emb.row(r).data() + emb.cols());
    out += row.dump();
    out += '\n';
  }
  return out;
}

void write_embeddings(const PeptideModel &model,
                      std::span<const PeptideRecord> records,
                      const std::filesystem::path &path) {
  write_file(path, embedding_table(model, records));
}

}  // namespace pepview
