//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_CONTAINER_H_
#define PEPVIEW_CONTAINER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pepview/core.h"
#include "pepview/nn.h"

namespace pepview {

inline constexpr std::string_view kContainerMagic = "PEPH";
inline constexpr std::uint32_t kContainerVersion = 1;

/**
 * Binary tensor container shared by checkpoints and graph files.
 *
 * Layout, all integers little-endian:
 *
 *   "PEPH" | u32 version | u64 header length | JSON header | payload
 *
 * The header holds {"tensors": [{"name", "dtype": "f64", "shape": [r, c],
 * "offset"}], "payload_size", "meta"}. Offsets are byte positions into the
 * payload, which stores each tensor row-major as IEEE-754 binary64.
 */
struct TensorContainer {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::vector<std::pair<std::string, Matrix>> tensors;
};

class ContainerError: public DataError {
public:
  enum class Kind { kNotContainer, kVersion, kPayloadSize, kTensorTable };

  ContainerError(Kind kind, const std::string &what)
      : DataError(what), kind_(kind) { }

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

std::string encode_container(const TensorContainer &container);
TensorContainer decode_container(std::string_view bytes);

void write_container(const TensorContainer &container,
                     const std::filesystem::path &path);
TensorContainer read_container(const std::filesystem::path &path);

// Writes bytes to path, replacing any existing file.
void write_file(const std::filesystem::path &path, std::string_view bytes);
std::string read_file(const std::filesystem::path &path);

}  // namespace pepview

#endif  // PEPVIEW_CONTAINER_H_
