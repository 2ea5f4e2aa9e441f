#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selmask/corpus.hpp"
#include "selmask/masking.hpp"
#include "selmask/records.hpp"
#include "selmask/rng.hpp"
#include "selmask/scoring.hpp"
#include "selmask/tokenizer.hpp"

namespace selmask {

/// Splits a document into windows of at most max_seq_len - 2 content
/// tokens, each wrapped as [CLS] ... [SEP]. Windows end on word
/// boundaries; a word longer than a whole window is cut to the window size
/// and its remainder dropped. Empty input gives no windows.
std::vector<std::vector<SubwordToken>> chunk(std::span<const SubwordToken> tokens,
                                             std::size_t max_seq_len,
                                             const SubwordToken& cls,
                                             const SubwordToken& sep);

/// The permutation applied by shuffle_dataset: out[i] is the source index
/// of element i.
std::vector<std::size_t> shuffle_permutation(std::size_t count, std::uint64_t seed,
                                             unsigned rounds);

/// Fisher-Yates, `rounds` times, reseeding the generator with `seed`
/// before each round.
template <typename T>
void shuffle_dataset(std::vector<T>& items, std::uint64_t seed, unsigned rounds) {
  for (unsigned r = 0; r < rounds; ++r) {
    Rng rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = rng.below(i);
      std::swap(items[i - 1], items[j]);
    }
  }
}

struct MaskingOptions {
  Selection selection = Selection::kTopN;
  std::size_t max_seq_len = 512;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct MaskingTotals {
  std::size_t sequences = 0;
  std::size_t content_tokens = 0;
  std::size_t masked_tokens = 0;
  std::size_t selected_spans = 0;
};

/// Chunks, scores, selects and corrupts every document. Each sequence draws
/// from its own generator seeded by derive_seed(seed, doc_id, seq_index),
/// so the output is the same for any thread count. Examples come back
/// ordered by (doc_id, seq_index), unshuffled. `table` may be null for
/// classical selection.
std::vector<MaskedExample> mask_documents(std::span<const Document> docs,
                                          const WordPieceTokenizer& tokenizer,
                                          const ScoreTable* table,
                                          const MaskingOptions& options,
                                          MaskingTotals* totals = nullptr);

struct PipelineConfig {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::kJsonLines;
  std::filesystem::path tokenizer;
  Scorer scorer = Scorer::kMetaDis;
  Selection selection = Selection::kTopN;
  std::size_t max_seq_len = 512;
  std::optional<std::uint64_t> seed;
  unsigned shuffle_rounds = 3;
  std::filesystem::path out;
  std::size_t report_k = 50;
  unsigned threads = 1;  // affects speed only, never output

  /// Throws ConfigError.
  void validate() const;
};

/// File names inside the output directory.
inline constexpr const char* kScoresFile = "scores.jsonl";
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kManifestFile = "manifest.json";

struct PipelineResult {
  MaskReport report;
  std::size_t documents = 0;
  MaskingTotals totals;
  std::string corpus_fingerprint;
  std::string stats_fingerprint;
  std::string config_hash;
};

/// Load, tokenize, count, score, mask, shuffle, then write the score
/// table, records, report and manifest into config.out. Failures are
/// rethrown with the stage name prefixed and the partial outputs removed.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Hash of every config field that influences output (not `out`, not
/// `threads`).
std::string config_hash(const PipelineConfig& config);

}  // namespace selmask
