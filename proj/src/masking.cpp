#include "selmask/masking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "selmask/errors.hpp"
#include "selmask/hash.hpp"

namespace selmask {
namespace {

bool over_budget(std::size_t masked, std::size_t n) { return 20 * masked > 3 * n; }
bool budget_reached(std::size_t masked, std::size_t n) { return 20 * masked >= 3 * n; }

std::size_t count_content_tokens(std::span<const SubwordToken> tokens) {
  return static_cast<std::size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const auto& t) { return !t.is_special; }));
}

MaskPlan select_scored(const ScoredSequence& seq, Selection selection, Rng& rng,
                       MaskPlan plan) {
  if (seq.scores.size() != seq.words.size()) {
    throw InvariantError("scored sequence has " + std::to_string(seq.scores.size()) +
                         " scores for " + std::to_string(seq.words.size()) + " words");
  }
  const std::size_t n = plan.content_tokens;

  // Remaining candidates as indices into seq.words. TopN walks a fixed
  // order; Rand renormalizes the remaining scores on every draw.
  std::vector<std::size_t> pool(seq.words.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (selection == Selection::kTopN) {
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      if (seq.scores[a] != seq.scores[b]) return seq.scores[a] > seq.scores[b];
      return seq.words[a].start < seq.words[b].start;
    });
    std::reverse(pool.begin(), pool.end());  // pop from the back
  }

  std::size_t masked = 0;
  std::vector<double> remaining;
  while (!budget_reached(masked, n) && !pool.empty()) {
    std::size_t pick;
    if (selection == Selection::kTopN) {
      pick = pool.back();
      pool.pop_back();
    } else {
      remaining.clear();
      for (std::size_t idx : pool) remaining.push_back(seq.scores[idx]);
      const std::size_t slot = sample_index(to_distribution(remaining), rng);
      pick = pool[slot];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(slot));
    }
    const WordSpan& w = seq.words[pick];
    if (!over_budget(masked + w.length, n)) {
      masked += w.length;
      plan.selected.push_back(w);
    }
  }
  std::sort(plan.selected.begin(), plan.selected.end(),
            [](const WordSpan& a, const WordSpan& b) { return a.start < b.start; });
  return plan;
}

MaskPlan select_classical(const ScoredSequence& seq, Rng& rng, MaskPlan plan) {
  // Enclosing word of every content token.
  std::vector<const WordSpan*> owner(seq.tokens.size(), nullptr);
  for (const auto& w : seq.words) {
    for (std::size_t i = w.start; i < w.end() && i < owner.size(); ++i) owner[i] = &w;
  }
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (!seq.tokens[i].is_special) positions.push_back(i);
  }
  // Partial Fisher-Yates: the first `take` slots become a uniform sample.
  const std::size_t take = std::min(plan.budget_tokens, positions.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  positions.resize(take);
  std::sort(positions.begin(), positions.end());
  for (std::size_t p : positions) {
    const std::string word = owner[p] ? owner[p]->word
                                      : std::string(piece_text(seq.tokens[p]));
    plan.selected.push_back(WordSpan{word, p, 1});
  }
  return plan;
}

}  // namespace

Selection parse_selection(std::string_view name) {
  if (name == "rand") return Selection::kRand;
  if (name == "topn") return Selection::kTopN;
  if (name == "classical") return Selection::kClassical;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Selection selection) {
  switch (selection) {
    case Selection::kRand: return "rand";
    case Selection::kTopN: return "topn";
    case Selection::kClassical: return "classical";
  }
  return "?";
}

std::string strategy_name(Scorer scorer, Selection selection) {
  if (selection == Selection::kClassical) return "classical-random";
  return std::string(to_string(scorer)) + "-" + std::string(to_string(selection));
}

std::size_t MaskPlan::masked_tokens() const {
  std::size_t total = 0;
  for (const auto& w : selected) total += w.length;
  return total;
}

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("cannot sample from no weights");
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the cumulative sum just under u.
  if (last_positive == weights.size()) {
    throw std::invalid_argument("weights have no positive entry");
  }
  return last_positive;
}

MaskPlan select_words(const ScoredSequence& seq, Selection selection, Rng& rng) {
  MaskPlan plan;
  plan.selection = selection;
  plan.content_tokens = count_content_tokens(seq.tokens);
  plan.budget_tokens = mask_budget(plan.content_tokens);
  if (selection == Selection::kClassical) return select_classical(seq, rng, std::move(plan));
  return select_scored(seq, selection, rng, std::move(plan));
}

MaskPlan select_words(const ScoredSequence& seq, Selection selection,
                      std::uint64_t seed) {
  Rng rng(seed);
  MaskPlan plan = select_words(seq, selection, rng);
  plan.seed = seed;
  return plan;
}

// ---------------------------------------------------------------------------

CorruptionVocab::CorruptionVocab(TokenId mask_id, const std::vector<bool>& is_special)
    : mask_id_(mask_id) {
  if (mask_id < 0 || static_cast<std::size_t>(mask_id) >= is_special.size()) {
    throw ConfigError("mask token id " + std::to_string(mask_id) +
                      " outside vocabulary of size " +
                      std::to_string(is_special.size()));
  }
  for (std::size_t i = 0; i < is_special.size(); ++i) {
    if (!is_special[i]) replacement_ids_.push_back(static_cast<TokenId>(i));
  }
  if (replacement_ids_.empty()) {
    throw ConfigError("vocabulary has no non-special token for random replacement");
  }
}

CorruptionVocab CorruptionVocab::from(const Vocabulary& vocab, TokenId mask_id) {
  std::vector<bool> special(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    special[i] = vocab.is_special(static_cast<TokenId>(i));
  }
  return CorruptionVocab(mask_id, special);
}

MaskedExample corrupt(std::span<const SubwordToken> tokens, const MaskPlan& plan,
                      Rng& rng, const CorruptionVocab& vocab) {
  MaskedExample ex;
  ex.original_ids.reserve(tokens.size());
  for (const auto& t : tokens) ex.original_ids.push_back(t.id);
  ex.corrupted_ids = ex.original_ids;

  for (const auto& span : plan.selected) {
    if (span.end() > tokens.size()) {
      throw InvariantError("mask plan span [" + std::to_string(span.start) + ", " +
                           std::to_string(span.end()) + ") exceeds sequence length " +
                           std::to_string(tokens.size()));
    }
    for (std::size_t i = span.start; i < span.end(); ++i) {
      if (tokens[i].is_special) {
        throw InvariantError("mask plan covers special token at " + std::to_string(i));
      }
      ex.masked_positions.push_back(i);
    }
  }
  std::sort(ex.masked_positions.begin(), ex.masked_positions.end());
  if (std::adjacent_find(ex.masked_positions.begin(), ex.masked_positions.end()) !=
      ex.masked_positions.end()) {
    throw InvariantError("mask plan spans overlap");
  }

  const auto pool = vocab.replacement_ids();
  for (std::size_t pos : ex.masked_positions) {
    ex.labels.push_back(ex.original_ids[pos]);
    const double u = rng.uniform01();
    CorruptionAction action;
    if (u < 0.8) {
      action = CorruptionAction::kMask;
      ex.corrupted_ids[pos] = vocab.mask_id();
    } else if (u < 0.9) {
      action = CorruptionAction::kRandom;
      ex.corrupted_ids[pos] = pool[rng.below(pool.size())];
    } else {
      action = CorruptionAction::kKeep;
    }
    ex.actions.push_back(action);
  }
  return ex;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view doc_id,
                          std::uint64_t seq_index) {
  std::string key = std::to_string(global_seed);
  key.push_back('|');
  key.append(doc_id);
  key.push_back('|');
  key.append(std::to_string(seq_index));
  return fnv1a64(key);
}

}  // namespace selmask
