//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <string>

#include "pepview/core.h"
#include "pepview/train.h"

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;
}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1)
    throw ConfigError("batch size must be at least 1");
  if (epochs < 0)
    throw ConfigError("epochs must be non-negative");
  if (!(adam.lr > 0))
    throw ConfigError("learning rate must be positive");
  if (!(clip_norm > 0))
    throw ConfigError("clip norm must be positive");
  ssl.validate();
  model.vrr.validate();
  if (model.hidden < 1 || model.heads < 1 || model.hidden % model.heads != 0)
    throw ConfigError("hidden width must be a positive multiple of heads");
}

ojson to_json(const ModelConfig &c) {
  return { { "hidden", c.hidden },
           { "structure_layers", c.structure_layers },
           { "sequence_blocks", c.sequence_blocks },
           { "heads", c.heads },
           { "readout", to_string(c.readout) },
           { "vrr",
             { { "latent", c.vrr.latent },
               { "beta", c.vrr.beta },
               { "mc_samples", c.vrr.mc_samples } } } };
}

ojson to_json(const TrainConfig &c) {
  return { { "batch_size", c.batch_size },
           { "epochs", c.epochs },
           { "adam",
             { { "lr", c.adam.lr },
               { "beta1", c.adam.beta1 },
               { "beta2", c.adam.beta2 },
               { "eps", c.adam.eps } } },
           { "batch_strategy", to_string(c.strategy) },
           { "seed", c.seed },
           { "loss", to_string(c.ssl.loss) },
           { "temperature", c.ssl.temperature },
           { "generative_weight", c.ssl.generative_weight },
           { "clip_norm", c.clip_norm },
           { "model", to_json(c.model) } };
}

ojson to_json(const GraphConfig &c) {
  return { { "radius_cutoff", c.radius_cutoff },
           { "knn_k", c.knn_k },
           { "mask_residue_identity", c.mask_residue_identity } };
}

ModelConfig model_config_from_json(const ojson &j) {
  ModelConfig c;
  c.hidden = j.at("hidden").get<int>();
  c.structure_layers = j.at("structure_layers").get<int>();
  c.sequence_blocks = j.at("sequence_blocks").get<int>();
  c.heads = j.at("heads").get<int>();
  c.readout = parse_readout(j.at("readout").get<std::string>());
  c.vrr.latent = j.at("vrr").at("latent").get<int>();
  c.vrr.beta = j.at("vrr").at("beta").get<double>();
  c.vrr.mc_samples = j.at("vrr").at("mc_samples").get<int>();
  return c;
}

TrainConfig train_config_from_json(const ojson &j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.adam.lr = j.at("adam").at("lr").get<double>();
  c.adam.beta1 = j.at("adam").at("beta1").get<double>();
  c.adam.beta2 = j.at("adam").at("beta2").get<double>();
  c.adam.eps = j.at("adam").at("eps").get<double>();
  c.strategy = parse_batch_strategy(j.at("batch_strategy").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.ssl.loss = parse_loss_kind(j.at("loss").get<std::string>());
  c.ssl.temperature = j.at("temperature").get<double>();
  c.ssl.generative_weight = j.at("generative_weight").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.model = model_config_from_json(j.at("model"));
  return c;
}

GraphConfig graph_config_from_json(const ojson &j) {
  GraphConfig c;
  c.radius_cutoff = j.at("radius_cutoff").get<double>();
  c.knn_k = j.at("knn_k").get<int>();
  c.mask_residue_identity = j.at("mask_residue_identity").get<bool>();
  return c;
}

}  // namespace pepview
