//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pepview/core.h"
#include "pepview/ingest.h"

namespace pepview {
namespace {
using ojson = nlohmann::ordered_json;

[[noreturn]] void reject(const PeptideRecord &record, std::string_view field,
                         std::string_view why) {
  throw DataError("record '" + record.id + "': field '" + std::string(field)
                  + "' " + std::string(why));
}
}  // namespace

void validate_record(const PeptideRecord &record) {
  if (record.id.empty())
    reject(record, "id", "is empty");
  if (record.sequence.empty())
    reject(record, "sequence", "is empty");
  for (char c: record.sequence)
    if (residue_index(c) < 0)
      reject(record, "sequence", "contains a code outside the vocabulary");

  if (record.coords.size() != record.sequence.size())
    reject(record, "coords", "length differs from sequence length");
  for (std::size_t i = 0; i < record.coords.size(); ++i) {
    const auto &c = record.coords[i];
    if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || !std::isfinite(c[2]))
      reject(record, "coords", "contains a non-finite value");
    if (i > 0 && c == record.coords[i - 1])
      reject(record, "coords", "has identical consecutive positions");
  }

  if (record.plddt) {
    if (record.plddt->size() != record.sequence.size())
      reject(record, "plddt", "length differs from sequence length");
    for (double p: *record.plddt)
      if (!std::isfinite(p) || p < 0 || p > 100)
        reject(record, "plddt", "value outside [0, 100]");
  }

  for (const auto &[task, value]: record.labels)
    if (!std::isfinite(value))
      reject(record, "labels", "value for '" + task + "' is not finite");
}

double mean_plddt(const PeptideRecord &record) {
  if (!record.plddt || record.plddt->empty())
    throw DataError("record '" + record.id + "' has no confidence data");
  const auto &p = *record.plddt;
  return std::accumulate(p.begin(), p.end(), 0.0)
         / static_cast<double>(p.size());
}

std::string bucket_name(double threshold) {
  std::ostringstream os;
  os << "af" << threshold;
  return os.str();
}

ConfidenceBuckets bucket_by_confidence(
    const std::vector<PeptideRecord> &records, std::vector<double> thresholds,
    std::optional<std::size_t> sample_size, std::uint64_t seed) {
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());

  std::vector<double> means;
  means.reserve(records.size());
  for (const auto &r: records) {
    if (!r.plddt || r.plddt->empty())
      throw DataError("record '" + r.id + "' has no confidence data");
    means.push_back(mean_plddt(r));
  }

  ConfidenceBuckets out;
  out.thresholds = thresholds;
  for (double t: thresholds) {
    auto &members = out.buckets[bucket_name(t)];
    for (std::size_t i = 0; i < records.size(); ++i)
      if (means[i] > t)
        members.push_back(records[i].id);
  }

  if (sample_size) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    order.resize(std::min(*sample_size, order.size()));
    std::sort(order.begin(), order.end());

    auto &members = out.buckets["af50w"];
    for (std::size_t i: order)
      members.push_back(records[i].id);
  }
  return out;
}

std::string record_to_json_line(const PeptideRecord &record) {
  ojson j;
  j["id"] = record.id;
  j["sequence"] = record.sequence;
  j["coords"] = ojson::array();
  for (const auto &c: record.coords)
    j["coords"].push_back({ c[0], c[1], c[2] });
  j["plddt"] = record.plddt ? ojson(*record.plddt) : ojson(nullptr);
  j["labels"] = ojson::object();
  for (const auto &[k, v]: record.labels)
    j["labels"][k] = v;
  j["split"] = to_string(record.split);
  j["source"] = to_string(record.source);
  return j.dump();
}

PeptideRecord record_from_json_line(std::string_view line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const ojson::parse_error &e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }

  PeptideRecord r;
  auto field = [&](const char *name) -> const ojson & {
    if (!j.is_object() || !j.contains(name))
      throw DataError(std::string("missing field '") + name + "'");
    return j.at(name);
  };

  try {
    r.id = field("id").get<std::string>();
    r.sequence = field("sequence").get<std::string>();
    for (const auto &c: field("coords")) {
      if (!c.is_array() || c.size() != 3)
        throw DataError("field 'coords' must hold [x, y, z] triples");
      r.coords.push_back(
          { c[0].get<double>(), c[1].get<double>(), c[2].get<double>() });
    }
    const auto &plddt = field("plddt");
    if (!plddt.is_null())
      r.plddt = plddt.get<std::vector<double>>();
    for (const auto &[k, v]: field("labels").items())
      r.labels[k] = v.get<double>();
    r.split = parse_split(field("split").get<std::string>());
    r.source = parse_source(field("source").get<std::string>());
  } catch (const ojson::exception &e) {
    throw DataError(std::string("field type error: ") + e.what());
  }

  validate_record(r);
  return r;
}

void write_manifest(const std::vector<PeptideRecord> &records,
                    const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw DataError("cannot open '" + path.string() + "' for writing");
  for (const auto &r: records) {
    validate_record(r);
    os << record_to_json_line(r) << '\n';
  }
  if (!os)
    throw DataError("write to '" + path.string() + "' failed");
}

std::vector<PeptideRecord> read_manifest(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw DataError("cannot open manifest '" + path.string() + "'");

  std::vector<PeptideRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const DataError &e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": "
                      + e.what());
    }
  }
  return records;
}

}  // namespace pepview
