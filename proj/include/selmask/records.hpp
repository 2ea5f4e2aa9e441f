#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selmask/masking.hpp"
#include "selmask/tokenizer.hpp"

namespace selmask {

/// One JSON object per line:
/// {"doc", "seq", "ids", "corrupted", "masked", "labels"}.
void write_records(std::span<const MaskedExample> examples, std::ostream& out);
/// Validates lengths, ordering and that labels and corrupted ids agree with
/// the original ids. Throws DataError naming the line. Corruption actions
/// are not stored and come back empty.
std::vector<MaskedExample> read_records(std::istream& in);

void save_records(std::span<const MaskedExample> examples,
                  const std::filesystem::path& path);
std::vector<MaskedExample> load_records(const std::filesystem::path& path);

/// Most frequently masked words.
struct MaskReport {
  std::string scorer;
  std::string strategy;
  std::string corpus_fingerprint;
  std::size_t k = 0;
  std::vector<std::pair<std::string, std::uint64_t>> entries;  // count desc

  bool operator==(const MaskReport&) const = default;
};

/// How many times each whole word was masked. Words are rebuilt from the
/// original ids; an occurrence counts once if any of its tokens is masked.
std::map<std::string, std::uint64_t> count_masked_words(
    std::span<const MaskedExample> examples, const Vocabulary& vocab);

/// Top `k` words by times masked, ties in lexicographic word order. Fewer
/// entries when fewer distinct words were masked.
MaskReport report_top_masked(std::span<const MaskedExample> examples,
                             const Vocabulary& vocab, std::size_t k = 50);

void write_report(const MaskReport& report, std::ostream& out);
MaskReport read_report(std::istream& in);
void save_report(const MaskReport& report, const std::filesystem::path& path);
MaskReport load_report(const std::filesystem::path& path);

}  // namespace selmask
