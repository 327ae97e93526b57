//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "pepview/ingest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.h"

namespace pepview {
namespace {
std::string ca_line(int serial, std::string_view resname, char chain,
                    int resseq, double x, double y, double z,
                    double bfactor = 0.0, std::string_view atom = " CA ",
                    char altloc = ' ') {
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "ATOM  %5d %4.4s%c%3.3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f",
                serial, atom.data(), altloc, resname.data(), chain, resseq, x,
                y, z, 1.0, bfactor);
  return buf;
}

TEST(Residues, ThreeToOne) {
  EXPECT_EQ(three_to_one("ALA"), 'A');
  EXPECT_EQ(three_to_one("TRP"), 'W');
  EXPECT_EQ(three_to_one("XYZ"), 'X');
  EXPECT_EQ(residue_index('A'), 0);
  EXPECT_EQ(residue_index('X'), 20);
}

TEST(ParseStructure, SingleAtom) {
  const std::string text =
      "ATOM      1  CA  ALA A   1      0.000   0.000   0.000  1.00  0.00\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental, "x");
  ASSERT_EQ(parsed.records.size(), 1);
  EXPECT_EQ(parsed.records[0].sequence, "A");
  EXPECT_EQ(parsed.records[0].coords, (std::vector<Vec3> { { 0, 0, 0 } }));
  EXPECT_EQ(parsed.records[0].id, "x_A");
  EXPECT_FALSE(parsed.records[0].plddt.has_value());
}

TEST(ParseStructure, TwoChains) {
  std::string text;
  int serial = 1;
  for (int i = 1; i <= 3; ++i)
    text += ca_line(serial++, "GLY", 'A', i, 3.8 * i, 0, 0) + "\n";
  for (int i = 1; i <= 2; ++i)
    text += ca_line(serial++, "LYS", 'B', i, 0, 3.8 * i, 0) + "\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental);
  ASSERT_EQ(parsed.records.size(), 2);
  EXPECT_EQ(parsed.records[0].size(), 3);
  EXPECT_EQ(parsed.records[1].size(), 2);
  EXPECT_EQ(parsed.records[1].sequence, "KK");
}

TEST(ParseStructure, UnknownResidueIsX) {
  const std::string text = ca_line(1, "XYZ", 'A', 1, 0, 0, 0) + "\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental);
  ASSERT_EQ(parsed.records.size(), 1);
  EXPECT_EQ(parsed.records[0].sequence, "X");
}

TEST(ParseStructure, OnlyAlphaCarbonsAndFirstAltLoc) {
  std::string text;
  text += ca_line(1, "ALA", 'A', 1, 0, 0, 0, 0, " N  ") + "\n";
  text += ca_line(2, "ALA", 'A', 1, 1, 0, 0, 0, " CA ", 'A') + "\n";
  text += ca_line(3, "ALA", 'A', 1, 9, 9, 9, 0, " CA ", 'B') + "\n";
  text += ca_line(4, "SER", 'A', 2, 4.8, 0, 0) + "\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental);
  ASSERT_EQ(parsed.records.size(), 1);
  EXPECT_EQ(parsed.records[0].sequence, "AS");
  EXPECT_EQ(parsed.records[0].coords[0], (Vec3 { 1, 0, 0 }));
}

TEST(ParseStructure, PredictedReadsPlddt) {
  std::string text;
  text += ca_line(1, "ALA", 'A', 1, 0, 0, 0, 91.5) + "\n";
  text += ca_line(2, "ALA", 'A', 2, 3.8, 0, 0, 72.25) + "\n";
  const auto parsed = parse_structure_file(text, Source::kPredicted);
  ASSERT_EQ(parsed.records.size(), 1);
  ASSERT_TRUE(parsed.records[0].plddt.has_value());
  EXPECT_EQ(*parsed.records[0].plddt, (std::vector<double> { 91.5, 72.25 }));
  EXPECT_EQ(parsed.records[0].source, Source::kPredicted);
}

TEST(ParseStructure, StopsAtFirstModel) {
  std::string text = "MODEL        1\n";
  text += ca_line(1, "ALA", 'A', 1, 0, 0, 0) + "\nENDMDL\nMODEL        2\n";
  text += ca_line(2, "GLY", 'A', 2, 3.8, 0, 0) + "\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental);
  ASSERT_EQ(parsed.records.size(), 1);
  EXPECT_EQ(parsed.records[0].sequence, "A");
}

TEST(ParseStructure, MalformedLineNamesLine) {
  const std::string text = "HEADER    TEST\n"
                           + ca_line(1, "ALA", 'A', 1, 0, 0, 0) + "\n"
                           + "ATOM      2  CA  ALA A   2      1.0x\n";
  try {
    parse_structure_file(text, Source::kExperimental);
    FAIL() << "expected DataError";
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos)
        << e.what();
  }
}

TEST(ParseStructure, SkipsInvalidChains) {
  std::string text;
  text += ca_line(1, "ALA", 'A', 1, 0, 0, 0) + "\n";
  text += ca_line(2, "ALA", 'A', 2, 0, 0, 0) + "\n";
  text += ca_line(3, "ALA", 'B', 1, 0, 0, 0) + "\n";
  const auto parsed = parse_structure_file(text, Source::kExperimental);
  ASSERT_EQ(parsed.records.size(), 1);
  EXPECT_EQ(parsed.records[0].id, "structure_B");
  EXPECT_EQ(parsed.skipped_invalid_chains, 1);
}

TEST(ParseStructure, RecordInvariants) {
  Rng rng(5);
  std::string text;
  int serial = 1;
  for (char chain: std::string("ABC")) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const auto coords = test::random_walk(n, rng);
    for (int i = 0; i < n; ++i)
      text += ca_line(serial++, "VAL", chain, i + 1, coords[i][0],
                      coords[i][1], coords[i][2], rng.uniform(0, 100))
              + "\n";
  }
  for (const auto &r:
       parse_structure_file(text, Source::kPredicted).records) {
    EXPECT_EQ(r.sequence.size(), r.coords.size());
    EXPECT_EQ(r.plddt->size(), r.coords.size());
  }
}

std::vector<PeptideRecord> with_lengths(std::initializer_list<int> lengths) {
  Rng rng(1);
  std::vector<PeptideRecord> out;
  int i = 0;
  for (int n: lengths)
    out.push_back(test::random_record("r" + std::to_string(i++), n, rng));
  return out;
}

TEST(FilterPeptides, StrictLength) {
  auto kept = filter_peptides(with_lengths({ 49, 50, 51 }), 50);
  ASSERT_EQ(kept.size(), 1);
  EXPECT_EQ(kept[0].size(), 49);
  EXPECT_TRUE(filter_peptides({}, 50).empty());
  EXPECT_EQ(filter_peptides(with_lengths({ 1, 2 }), 50).size(), 2);
  EXPECT_THROW(filter_peptides({}, 1), ConfigError);
}

TEST(FilterPeptides, IdempotentAndOrderPreserving) {
  const auto records = with_lengths({ 5, 60, 3, 49, 50, 12 });
  const auto once = filter_peptides(records, 50);
  EXPECT_EQ(filter_peptides(once, 50), once);
  std::vector<std::string> ids;
  for (const auto &r: once)
    ids.push_back(r.id);
  EXPECT_EQ(ids, (std::vector<std::string> { "r0", "r2", "r3", "r5" }));
}

PeptideRecord with_plddt(const std::string &id, std::vector<double> values) {
  Rng rng(3);
  PeptideRecord r =
      test::random_record(id, static_cast<int>(values.size()), rng);
  r.plddt = std::move(values);
  r.source = Source::kPredicted;
  return r;
}

TEST(Confidence, MeanWithinRange) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + rng.below(20));
    for (auto &x: v)
      x = rng.uniform(0, 100);
    const double m = mean_plddt(with_plddt("p", v));
    EXPECT_GE(m, *std::min_element(v.begin(), v.end()) - 1e-12);
    EXPECT_LE(m, *std::max_element(v.begin(), v.end()) + 1e-12);
  }
}

TEST(Confidence, BucketNames) {
  EXPECT_EQ(bucket_name(90), "af90");
  EXPECT_EQ(bucket_name(82.5), "af82.5");
}

TEST(Manifest, RoundTripOneRecord) {
  Rng rng(2);
  PeptideRecord r = test::random_record("one", 4, rng);
  r.labels["cpp"] = 1;
  EXPECT_EQ(record_from_json_line(record_to_json_line(r)), r);
}

TEST(Manifest, RejectsLengthMismatch) {
  Rng rng(2);
  PeptideRecord r = test::random_record("bad", 4, rng);
  auto j = nlohmann::json::parse(record_to_json_line(r));
  j["coords"].erase(0);
  EXPECT_THROW(record_from_json_line(j.dump()), DataError);
}

TEST(Manifest, FileKeepsOrderAndReportsLine) {
  Rng rng(4);
  std::vector<PeptideRecord> records;
  for (int i = 0; i < 3; ++i)
    records.push_back(test::random_record("m" + std::to_string(i), 3 + i, rng));
  const auto dir = test::scratch_dir("manifest");
  write_manifest(records, dir / "m.jsonl");
  EXPECT_EQ(read_manifest(dir / "m.jsonl"), records);

  {
    std::ofstream os(dir / "bad.jsonl");
    os << record_to_json_line(records[0]) << "\n{not json\n";
  }
  try {
    read_manifest(dir / "bad.jsonl");
    FAIL() << "expected DataError";
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}
}  // namespace
}  // namespace pepview
