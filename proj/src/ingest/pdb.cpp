//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pepview/core.h"
#include "pepview/ingest.h"

namespace pepview {
namespace {
struct ChainAccumulator {
  char chain_id;
  bool has_atoms = false;
  std::set<int> seen_residues;
  PeptideRecord record;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t lineno, std::string_view what) {
  throw DataError("line " + std::to_string(lineno) + ": " + std::string(what));
}

double parse_real(std::string_view field, std::size_t lineno,
                  std::string_view name) {
  field = trim(field);
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()
      || !std::isfinite(value))
    fail(lineno, "malformed " + std::string(name) + " column");
  return value;
}

int parse_int(std::string_view field, std::size_t lineno,
              std::string_view name) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    fail(lineno, "malformed " + std::string(name) + " column");
  return value;
}

ChainAccumulator &chain_for(std::vector<ChainAccumulator> &chains, char id) {
  for (auto &c: chains)
    if (c.chain_id == id)
      return c;
  chains.push_back({ id, false, {}, {} });
  return chains.back();
}
}  // namespace

ParseResult parse_structure_file(std::string_view text, Source source,
                                 std::string_view id_prefix) {
  std::vector<ChainAccumulator> chains;
  const bool read_plddt = source == Source::kPredicted;

  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++lineno;

    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.starts_with("ENDMDL"))
      break;
    if (!line.starts_with("ATOM  "))
      continue;

    if (line.size() < 54)
      fail(lineno, "ATOM record shorter than the coordinate columns");

    ChainAccumulator &chain = chain_for(chains, line[21]);
    chain.has_atoms = true;

    if (trim(line.substr(12, 4)) != "CA")
      continue;

    const int resseq = parse_int(line.substr(22, 4), lineno, "residue number");
    const Vec3 xyz { parse_real(line.substr(30, 8), lineno, "x"),
                     parse_real(line.substr(38, 8), lineno, "y"),
                     parse_real(line.substr(46, 8), lineno, "z") };
    double bfactor = 0;
    if (read_plddt) {
      if (line.size() < 66)
        fail(lineno, "missing B-factor column");
      bfactor = parse_real(line.substr(60, 6), lineno, "B-factor");
    }

    if (!chain.seen_residues.insert(resseq).second)
      continue;

    chain.record.sequence.push_back(three_to_one(trim(line.substr(17, 3))));
    chain.record.coords.push_back(xyz);
    if (read_plddt) {
      if (!chain.record.plddt)
        chain.record.plddt.emplace();
      chain.record.plddt->push_back(bfactor);
    }
  }

  ParseResult result;
  for (auto &chain: chains) {
    if (chain.record.sequence.empty()) {
      ++result.skipped_empty_chains;
      continue;
    }

    PeptideRecord &rec = chain.record;
    rec.id = std::string(id_prefix) + "_"
             + (chain.chain_id == ' ' ? std::string("_")
                                      : std::string(1, chain.chain_id));
    rec.source = source;
    try {
      validate_record(rec);
    } catch (const DataError &) {
      ++result.skipped_invalid_chains;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::vector<PeptideRecord> filter_peptides(std::vector<PeptideRecord> records,
                                           std::size_t max_len) {
  if (max_len < 2)
    throw ConfigError("max_len must be at least 2");
  std::erase_if(records,
                [&](const PeptideRecord &r) { return r.size() >= max_len; });
  return records;
}

}  // namespace pepview
