#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selmask/tokenizer.hpp"

namespace selmask {

class ScoreTable;

/// A whole word: a contiguous run of subword tokens [start, start+length).
struct WordSpan {
  std::string word;
  std::size_t start = 0;
  std::size_t length = 1;

  std::size_t end() const { return start + length; }
  bool operator==(const WordSpan&) const = default;
};

/// Groups each non-special token with the continuation tokens that follow
/// it. Special tokens belong to no span. A continuation token at sequence
/// start or right after a special token opens its own span.
std::vector<WordSpan> whole_words(std::span<const SubwordToken> tokens);

/// Strips the continuation prefix from a token surface.
std::string_view piece_text(const SubwordToken& token);

struct ScoredSequence {
  std::string doc_id;
  std::vector<SubwordToken> tokens;
  std::vector<WordSpan> words;
  std::vector<double> scores;  // aligned to words
};

/// Looks up one score per word; entries missing from the table score 0.
std::vector<double> score_sequence(std::span<const WordSpan> words,
                                   const ScoreTable& table,
                                   std::string_view doc_id);

ScoredSequence make_scored_sequence(std::string doc_id,
                                    std::vector<SubwordToken> tokens,
                                    const ScoreTable& table);

}  // namespace selmask
