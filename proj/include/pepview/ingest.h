//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_INGEST_H_
#define PEPVIEW_INGEST_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pepview {

/// Number of residue tokens: the 20 standard amino acids plus 'X'.
inline constexpr int kNumResidueTypes = 21;
inline constexpr std::string_view kResidueAlphabet = "ACDEFGHIKLMNPQRSTVWYX";

// Index of a one-letter code in kResidueAlphabet, or -1 when not a token.
int residue_index(char code);

// Three-letter residue name to one-letter code; anything unknown is 'X'.
char three_to_one(std::string_view resname);

enum class Split { kTrain, kValid, kTest };
enum class Source { kExperimental, kPredicted };

std::string_view to_string(Split split);
std::string_view to_string(Source source);
Split parse_split(std::string_view text);
Source parse_source(std::string_view text);

using Vec3 = std::array<double, 3>;

struct PeptideRecord {
  std::string id;
  std::string sequence;
  std::vector<Vec3> coords;
  std::optional<std::vector<double>> plddt;
  std::map<std::string, double> labels;
  Split split = Split::kTrain;
  Source source = Source::kExperimental;

  std::size_t size() const { return sequence.size(); }

  bool operator==(const PeptideRecord &) const = default;
};

/// Throws DataError naming the offending field if the record violates the
/// length, vocabulary, finiteness or distinct-consecutive-coordinate rules.
void validate_record(const PeptideRecord &record);

struct ParseResult {
  std::vector<PeptideRecord> records;
  // Chains that produced no C-alpha atoms.
  int skipped_empty_chains = 0;
  // Chains dropped because their coordinates violate record invariants.
  int skipped_invalid_chains = 0;
};

/**
 * Extracts one record per chain from PDB-format text.
 *
 * Only ATOM records whose atom name is CA are used; parsing stops at the
 * first ENDMDL so only the first model is read. A residue is keyed by
 * (chain, residue number): the first C-alpha seen for a key wins and any
 * later alternate location or insertion code sharing that key is dropped.
 * For predicted structures the B-factor column carries per-residue pLDDT.
 *
 * Record ids are "<id_prefix>_<chain>". Malformed ATOM lines raise
 * DataError with the 1-based line number.
 */
ParseResult parse_structure_file(std::string_view text, Source source,
                                 std::string_view id_prefix = "structure");

// Keeps records strictly shorter than max_len, preserving order.
std::vector<PeptideRecord> filter_peptides(std::vector<PeptideRecord> records,
                                           std::size_t max_len = 50);

double mean_plddt(const PeptideRecord &record);

struct ConfidenceBuckets {
  std::vector<double> thresholds;
  // Bucket name -> member ids, in input order.
  std::map<std::string, std::vector<std::string>> buckets;
};

// "af90" for 90, "af82.5" for 82.5.
std::string bucket_name(double threshold);

/// Threshold buckets use a strict comparison (mean > threshold). When
/// sample_size is given an extra "af50w" bucket holds a seeded uniform
/// sample of that many records drawn irrespective of confidence.
ConfidenceBuckets bucket_by_confidence(
    const std::vector<PeptideRecord> &records,
    std::vector<double> thresholds = { 90.0, 80.0 },
    std::optional<std::size_t> sample_size = std::nullopt,
    std::uint64_t seed = 0);

// JSONL manifest, one record per line.
std::string record_to_json_line(const PeptideRecord &record);
PeptideRecord record_from_json_line(std::string_view line);

void write_manifest(const std::vector<PeptideRecord> &records,
                    const std::filesystem::path &path);
std::vector<PeptideRecord> read_manifest(const std::filesystem::path &path);

}  // namespace pepview

#endif  // PEPVIEW_INGEST_H_
