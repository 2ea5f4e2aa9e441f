#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "selmask/corpus.hpp"
#include "selmask/segmentation.hpp"

namespace selmask {

/// Occurrence counts of one word. df is the number of documents in dtf.
struct WordStats {
  std::uint64_t tf = 0;
  std::map<std::string, std::uint64_t, std::less<>> dtf;  // doc_id -> count

  std::uint64_t df() const { return dtf.size(); }
  bool operator==(const WordStats&) const = default;
};

/// Corpus-level word counts over normalized whole words. Special tokens are
/// never counted. Ordered containers make iteration, serialization and the
/// fingerprint independent of insertion order.
class CorpusStats {
 public:
  using WordMap = std::map<std::string, WordStats, std::less<>>;

  CorpusStats() = default;

  /// Counts for a single document.
  static CorpusStats from_words(std::string doc_id,
                                std::span<const WordSpan> words);

  /// Adds another partial result. Associative and commutative; throws
  /// DataError when both sides contain the same document.
  void merge(const CorpusStats& other);

  std::uint64_t num_documents() const { return num_documents_; }
  const WordMap& words() const { return words_; }
  /// nullptr for words absent from the corpus.
  const WordStats* find(std::string_view word) const;

  /// Checks df = |dtf|, tf = sum(dtf), 1 <= df <= min(tf, N), and that
  /// dtf keys are known documents. Throws DataError.
  void validate() const;

  /// One JSON object per line: {"N": ...} then one record per word.
  void write(std::ostream& out) const;
  static CorpusStats read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static CorpusStats load(const std::filesystem::path& path);

  std::string fingerprint() const;

  bool operator==(const CorpusStats&) const = default;

 private:
  std::uint64_t num_documents_ = 0;
  // Documents known to this accumulator; empty when read from a file,
  // which carries only N.
  std::set<std::string, std::less<>> doc_ids_;
  WordMap words_;
};

/// Accumulates statistics over tokenized documents, in parallel when
/// `threads` > 1. The result does not depend on thread count. Throws
/// DataError for an empty corpus.
CorpusStats build_stats(std::span<const Document> docs, unsigned threads = 1);

}  // namespace selmask
