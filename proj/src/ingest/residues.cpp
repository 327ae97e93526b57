//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <string_view>
#include <utility>

#include "pepview/core.h"
#include "pepview/ingest.h"

namespace pepview {
namespace {
constexpr std::array<std::pair<std::string_view, char>, 20> kThreeLetter {
  {
      { "ALA", 'A' }, { "ARG", 'R' }, { "ASN", 'N' }, { "ASP", 'D' },
      { "CYS", 'C' }, { "GLN", 'Q' }, { "GLU", 'E' }, { "GLY", 'G' },
      { "HIS", 'H' }, { "ILE", 'I' }, { "LEU", 'L' }, { "LYS", 'K' },
      { "MET", 'M' }, { "PHE", 'F' }, { "PRO", 'P' }, { "SER", 'S' },
      { "THR", 'T' }, { "TRP", 'W' }, { "TYR", 'Y' }, { "VAL", 'V' },
  }
};
}  // namespace

int residue_index(char code) {
  const auto pos = kResidueAlphabet.find(code);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

char three_to_one(std::string_view resname) {
  auto it = std::find_if(kThreeLetter.begin(), kThreeLetter.end(),
                         [&](const auto &p) { return p.first == resname; });
  return it == kThreeLetter.end() ? 'X' : it->second;
}

std::string_view to_string(Split split) {
  switch (split) {
  case Split::kTrain:
    return "train";
  case Split::kValid:
    return "valid";
  case Split::kTest:
    return "test";
  }
  return "train";
}

std::string_view to_string(Source source) {
  return source == Source::kPredicted ? "predicted" : "experimental";
}

Split parse_split(std::string_view text) {
  if (text == "train")
    return Split::kTrain;
  if (text == "valid")
    return Split::kValid;
  if (text == "test")
    return Split::kTest;
  throw DataError("unknown split '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  if (text == "experimental")
    return Source::kExperimental;
  if (text == "predicted")
    return Source::kPredicted;
  throw DataError("unknown source '" + std::string(text) + "'");
}

}  // namespace pepview
