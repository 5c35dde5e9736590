#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "dyadic/types.hpp"

namespace dyadic {

// JSON-Lines feature file: one partner record per line with keys
//   couple_id  string
//   role       "m" | "f"
//   linguistic       array of 768 numbers
//   paralinguistic   array of 176 numbers
//   mdmq       {good_bad, happy_sad, [relaxed_angry], [calm_stressed]}
//   label      optional 0 | 1, must agree with the MDMQ items
// Any other key is rejected. Blank lines are ignored.

// Parses and validates one line. `line_no` is used in error messages only.
PartnerRecord parse_record(std::string_view line, std::size_t line_no);

// Throws SchemaError (with the offending 1-based line) on any invalid record,
// including a repeated couple_id + role pair. Labels missing from the file
// are filled in from the MDMQ items.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);

// Shortest round-trip decimal form, so write -> read is bit-exact.
std::string serialize_record(const PartnerRecord& record);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct RoleStats {
  std::size_t samples = 0;
  std::size_t negatives = 0;

  std::size_t positives() const noexcept { return samples - negatives; }
  // negatives / samples; 0 when there are no samples.
  double negative_ratio() const noexcept;
};

struct CorpusStats {
  std::size_t couples = 0;
  RoleStats male;
  RoleStats female;

  const RoleStats& role(Role r) const noexcept { return r == Role::Male ? male : female; }
};

// Throws Error(EmptyCorpus) when the corpus has no dyads.
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace dyadic
