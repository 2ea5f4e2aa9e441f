#include "selmask/segmentation.hpp"

#include <spdlog/spdlog.h>

#include "selmask/scoring.hpp"

namespace selmask {

std::string_view piece_text(const SubwordToken& token) {
  std::string_view s = token.surface;
  if (token.is_continuation && s.starts_with(kContinuationPrefix)) {
    s.remove_prefix(kContinuationPrefix.size());
  }
  return s;
}

std::vector<WordSpan> whole_words(std::span<const SubwordToken> tokens) {
  std::vector<WordSpan> spans;
  bool open = false;  // the last span may still be extended
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const SubwordToken& t = tokens[i];
    if (t.is_special) {
      open = false;
      continue;
    }
    if (t.is_continuation && open) {
      spans.back().word.append(piece_text(t));
      ++spans.back().length;
      continue;
    }
    if (t.is_continuation) {
      spdlog::debug("continuation token '{}' at {} has no word start",
                    t.surface, i);
    }
    spans.push_back(WordSpan{std::string(piece_text(t)), i, 1});
    open = true;
  }
  return spans;
}

std::vector<double> score_sequence(std::span<const WordSpan> words,
                                   const ScoreTable& table,
                                   std::string_view doc_id) {
  std::vector<double> scores;
  scores.reserve(words.size());
  for (const auto& w : words) scores.push_back(table.lookup(doc_id, w.word));
  return scores;
}

ScoredSequence make_scored_sequence(std::string doc_id,
                                    std::vector<SubwordToken> tokens,
                                    const ScoreTable& table) {
  ScoredSequence seq{std::move(doc_id), std::move(tokens), {}, {}};
  seq.words = whole_words(seq.tokens);
  seq.scores = score_sequence(seq.words, table, seq.doc_id);
  return seq;
}

}  // namespace selmask
