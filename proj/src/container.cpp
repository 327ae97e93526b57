//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/container.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;

template <class T>
void put_le(std::string &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <class T>
T get_le(std::string_view bytes, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<unsigned char>(bytes[pos + i]))
             << (8 * i);
  return value;
}

using Kind = ContainerError::Kind;
}  // namespace

std::string encode_container(const TensorContainer &container) {
  ojson table = ojson::array();
  std::string payload;
  std::set<std::string> names;
  for (const auto &[name, m]: container.tensors) {
    if (!names.insert(name).second)
      throw ConfigError("duplicate tensor name '" + name + "'");
    table.push_back({ { "name", name },
                      { "dtype", "f64" },
                      { "shape", { m.rows(), m.cols() } },
                      { "offset", payload.size() } });
    for (Eigen::Index i = 0; i < m.size(); ++i)
      put_le(payload, std::bit_cast<std::uint64_t>(m.data()[i]));
  }

  ojson header;
  header["tensors"] = std::move(table);
  header["payload_size"] = payload.size();
  header["meta"] = container.meta;
  const std::string header_text = header.dump();

  std::string out(kContainerMagic);
  put_le<std::uint32_t>(out, kContainerVersion);
  put_le<std::uint64_t>(out, header_text.size());
  out += header_text;
  out += payload;
  return out;
}

TensorContainer decode_container(std::string_view bytes) {
  constexpr std::size_t kPrefix = 4 + 4 + 8;
  if (bytes.size() < 4 || bytes.substr(0, 4) != kContainerMagic)
    throw ContainerError(Kind::kNotContainer, "not a checkpoint (bad magic)");
  if (bytes.size() < kPrefix)
    throw ContainerError(Kind::kPayloadSize,
                         "payload size mismatch: truncated preamble");

  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kContainerVersion)
    throw ContainerError(Kind::kVersion, "unsupported container version "
                                             + std::to_string(version));

  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  if (header_len > bytes.size() - kPrefix)
    throw ContainerError(Kind::kPayloadSize,
                         "payload size mismatch: truncated header");

  ojson header;
  try {
    header = ojson::parse(bytes.substr(kPrefix, header_len));
  } catch (const ojson::exception &e) {
    throw ContainerError(Kind::kTensorTable,
                         std::string("unreadable header: ") + e.what());
  }

  const std::string_view payload = bytes.substr(kPrefix + header_len);
  TensorContainer out;
  try {
    const auto declared = header.at("payload_size").get<std::uint64_t>();
    if (declared != payload.size())
      throw ContainerError(Kind::kPayloadSize,
                           "payload size mismatch: header declares "
                               + std::to_string(declared) + " bytes, file has "
                               + std::to_string(payload.size()));

    out.meta = header.value("meta", ojson::object());
    std::uint64_t expected_offset = 0;
    for (const auto &entry: header.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      if (entry.at("dtype").get<std::string>() != "f64")
        throw ContainerError(Kind::kTensorTable,
                             "tensor '" + name + "' has unsupported dtype");
      const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0)
        throw ContainerError(Kind::kTensorTable,
                             "tensor '" + name + "' has an invalid shape");
      const auto count = static_cast<std::uint64_t>(shape[0]) * shape[1];
      if (offset != expected_offset || offset + 8 * count > payload.size())
        throw ContainerError(Kind::kTensorTable,
                             "tensor '" + name
                                 + "' offset/shape inconsistent with payload");

      Matrix m(shape[0], shape[1]);
      for (std::uint64_t i = 0; i < count; ++i)
        m.data()[i] =
            std::bit_cast<double>(get_le<std::uint64_t>(payload, offset + 8 * i));
      out.tensors.emplace_back(name, std::move(m));
      expected_offset = offset + 8 * count;
    }
    if (expected_offset != payload.size())
      throw ContainerError(Kind::kTensorTable,
                           "tensor table does not cover the payload");
  } catch (const ojson::exception &e) {
    throw ContainerError(Kind::kTensorTable,
                         std::string("malformed tensor table: ") + e.what());
  }
  return out;
}

void write_file(const std::filesystem::path &path, std::string_view bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw DataError("cannot open '" + path.string() + "' for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os)
    throw DataError("write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw DataError("cannot open '" + path.string() + "'");
  return { std::istreambuf_iterator<char>(is),
           std::istreambuf_iterator<char>() };
}

void write_container(const TensorContainer &container,
                     const std::filesystem::path &path) {
  write_file(path, encode_container(container));
}

TensorContainer read_container(const std::filesystem::path &path) {
  return decode_container(read_file(path));
}

}  // namespace pepview
