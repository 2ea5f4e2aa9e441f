#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selmask/stats.hpp"

namespace selmask {

enum class Scorer { kMetaDis, kTfIdf };
enum class ScoreScope { kGlobal, kPerDocument };

Scorer parse_scorer(std::string_view name);  // "metadis" | "tfidf"
std::string_view to_string(Scorer scorer);
std::string_view to_string(ScoreScope scope);  // "global" | "per-document"

/// Word importance scores. Global tables map word -> score; per-document
/// tables map (doc_id, word) -> score. Immutable once built and shared
/// read-only between threads.
class ScoreTable {
 public:
  using WordScores = std::map<std::string, double, std::less<>>;

  ScoreTable(ScoreScope scope, Scorer provenance, std::string fingerprint);

  ScoreScope scope() const { return scope_; }
  Scorer provenance() const { return provenance_; }
  const std::string& fingerprint() const { return fingerprint_; }

  /// Score of `word`; `doc_id` is ignored by global tables. Missing
  /// entries score 0.
  double lookup(std::string_view doc_id, std::string_view word) const;

  void set_global(std::string word, double score);
  void set(std::string doc_id, std::string word, double score);

  const WordScores& global_entries() const { return global_; }
  const std::map<std::string, WordScores, std::less<>>& document_entries() const {
    return per_doc_;
  }
  std::size_t size() const;

  /// Scores finite and >= 0; metadis global with scores <= 1; tfidf
  /// per-document with every document vector of unit norm. Throws DataError.
  void validate() const;

  bool operator==(const ScoreTable&) const = default;

 private:
  ScoreScope scope_;
  Scorer provenance_;
  std::string fingerprint_;
  WordScores global_;
  std::map<std::string, WordScores, std::less<>> per_doc_;
};

/// Genre specificity of every corpus word:
///   s = (df / tf) * (1 - std(dtf) / max(dtf)) * (df / N)
/// where std is the population standard deviation over the documents that
/// contain the word. Result lies in [0, 1].
ScoreTable metadis_score(const CorpusStats& stats);

/// Per-document TF x IDF with raw counts, smoothed idf
/// ln((1 + N) / (1 + df)) + 1, and L2-normalized document vectors.
ScoreTable tfidf_score(const CorpusStats& stats);

/// ln((1 + n_docs) / (1 + df)) + 1
double smoothed_idf(std::uint64_t n_docs, std::uint64_t df);

ScoreTable compute_scores(const CorpusStats& stats, Scorer scorer);

/// Normalizes nonnegative scores to sum 1; an all-zero input becomes
/// uniform. Throws std::invalid_argument on empty, negative or non-finite
/// input.
std::vector<double> to_distribution(std::span<const double> scores);

/// Header line {"scope", "provenance", "fingerprint"} then one entry per
/// line. Scores are written with 17 significant digits so reading them
/// back is bit-exact.
void write_table(const ScoreTable& table, std::ostream& out);
/// Throws DataError on malformed content, invariant violations, or when
/// `expected_scope` is given and differs.
ScoreTable read_table(std::istream& in,
                      std::optional<ScoreScope> expected_scope = std::nullopt);

void save_table(const ScoreTable& table, const std::filesystem::path& path);
/// Like read_table; additionally logs a warning when `stats` is given and
/// its fingerprint differs from the table's.
ScoreTable load_table(const std::filesystem::path& path,
                      std::optional<ScoreScope> expected_scope = std::nullopt,
                      const CorpusStats* stats = nullptr);

bool fingerprint_matches(const ScoreTable& table, const CorpusStats& stats);

}  // namespace selmask
