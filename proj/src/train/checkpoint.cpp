//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <map>
#include <string>

#include "pepview/container.h"
#include "pepview/core.h"
#include "pepview/train.h"

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;
using Kind = ContainerError::Kind;

constexpr int kCheckpointFormat = 1;
}  // namespace

TensorContainer checkpoint_to_container(Checkpoint &checkpoint) {
  TensorContainer c;
  c.meta["kind"] = "checkpoint";
  c.meta["format"] = kCheckpointFormat;
  c.meta["version"] = kVersion;
  c.meta["model"] = to_json(checkpoint.model.config());
  c.meta["train"] = to_json(checkpoint.train);
  c.meta["graph"] = to_json(checkpoint.graph);
  c.meta["rng_state"] = checkpoint.rng_state;
  c.meta["step"] = checkpoint.step;

  for (const auto &p: checkpoint.model.parameters())
    c.tensors.emplace_back(p.name, p.param->value);
  for (const auto &b: checkpoint.model.buffers())
    c.tensors.emplace_back(b.name, *b.value);
  return c;
}

Checkpoint checkpoint_from_container(const TensorContainer &container) {
  const auto &meta = container.meta;
  if (meta.value("kind", "") != "checkpoint")
    throw ContainerError(Kind::kNotContainer,
                         "not a checkpoint (container holds other data)");
  if (meta.value("format", 0) != kCheckpointFormat)
    throw ContainerError(Kind::kVersion, "unsupported checkpoint format");

  Checkpoint ckpt {
    PeptideModel(model_config_from_json(meta.at("model")), 0),
    train_config_from_json(meta.at("train")),
    graph_config_from_json(meta.at("graph")),
    meta.at("rng_state").get<std::string>(),
    meta.at("step").get<long>(),
  };

  std::map<std::string, Matrix *> slots;
  for (const auto &p: ckpt.model.parameters())
    slots[p.name] = &p.param->value;
  for (const auto &b: ckpt.model.buffers())
    slots[b.name] = b.value;

  if (slots.size() != container.tensors.size())
    throw ContainerError(Kind::kTensorTable,
                         "checkpoint holds "
                             + std::to_string(container.tensors.size())
                             + " tensors, model expects "
                             + std::to_string(slots.size()));
  for (const auto &[name, value]: container.tensors) {
    auto it = slots.find(name);
    if (it == slots.end())
      throw ContainerError(Kind::kTensorTable,
                           "unexpected tensor '" + name + "'");
    if (it->second->rows() != value.rows()
        || it->second->cols() != value.cols())
      throw ContainerError(Kind::kTensorTable,
                           "tensor '" + name + "' has shape "
                               + shape_string(value) + ", model expects "
                               + shape_string(*it->second));
    *it->second = value;
  }
  for (const auto &p: ckpt.model.parameters())
    p.param->zero_grad();
  return ckpt;
}

void save_checkpoint(Checkpoint &checkpoint,
                     const std::filesystem::path &path) {
  write_container(checkpoint_to_container(checkpoint), path);
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  try {
    return checkpoint_from_container(read_container(path));
  } catch (const nlohmann::ordered_json::exception &e) {
    throw ContainerError(Kind::kTensorTable,
                         std::string("malformed checkpoint metadata: ")
                             + e.what());
  }
}

}  // namespace pepview
