#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selmask/rng.hpp"
#include "selmask/scoring.hpp"
#include "selmask/segmentation.hpp"
#include "selmask/tokenizer.hpp"

namespace selmask {

/// How words are picked from a scored sequence.
enum class Selection {
  kRand,       // weighted sampling without replacement
  kTopN,       // highest remaining score, ties to the lowest start
  kClassical,  // uniform token-level baseline, scores ignored
};

Selection parse_selection(std::string_view name);  // "rand" | "topn" | "classical"
std::string_view to_string(Selection selection);

/// Scorer and selection combined: "metadis-rand", ..., "classical-random".
std::string strategy_name(Scorer scorer, Selection selection);

/// Largest masked token count x with x <= 0.15 * n, i.e. 20x <= 3n.
constexpr std::size_t mask_budget(std::size_t content_tokens) {
  return 3 * content_tokens / 20;
}

struct MaskPlan {
  std::vector<WordSpan> selected;  // disjoint, sorted by start
  std::size_t content_tokens = 0;  // n: non-special tokens of the sequence
  std::size_t budget_tokens = 0;
  Selection selection = Selection::kTopN;
  std::optional<Scorer> scorer;
  std::uint64_t seed = 0;

  std::size_t masked_tokens() const;
};

/// Picks an index with probability weights[i]. Expects a probability
/// vector such as to_distribution returns; the caller removes the drawn
/// entry and renormalizes for the next draw. Throws std::invalid_argument
/// on an empty vector.
std::size_t sample_index(std::span<const double> weights, Rng& rng);

/// Explicit whole-word masking loop. Candidates are drawn one by one
/// (Rand: sampled from the renormalized remaining scores; TopN: the
/// maximum) and removed from the pool; a candidate is kept only if the
/// masked token count stays within 15% of the non-special tokens. The loop
/// stops once 15% is reached or the pool is empty. Budget comparisons use
/// integers (20x vs 3n).
///
/// Classical selection ignores scores and masks mask_budget(n) distinct
/// non-special tokens chosen uniformly; each becomes a one-token span
/// labelled with its enclosing word.
MaskPlan select_words(const ScoredSequence& seq, Selection selection, Rng& rng);
/// Same, drawing from a generator seeded with `seed`, recorded in the plan.
MaskPlan select_words(const ScoredSequence& seq, Selection selection,
                      std::uint64_t seed);

enum class CorruptionAction : std::uint8_t { kMask, kRandom, kKeep };

struct MaskedExample {
  std::string doc_id;
  std::size_t seq_index = 0;
  std::vector<TokenId> original_ids;
  std::vector<TokenId> corrupted_ids;
  std::vector<std::size_t> masked_positions;  // ascending
  std::vector<TokenId> labels;                // original id per masked position
  std::vector<CorruptionAction> actions;      // per masked position, not serialized

  bool operator==(const MaskedExample&) const = default;
};

/// Ids used to corrupt selected tokens: the mask id, and the pool of
/// non-special ids that random replacement draws from.
class CorruptionVocab {
 public:
  /// Throws ConfigError when mask_id lies outside [0, is_special.size())
  /// or no non-special id exists.
  CorruptionVocab(TokenId mask_id, const std::vector<bool>& is_special);
  static CorruptionVocab from(const Vocabulary& vocab, TokenId mask_id);

  TokenId mask_id() const { return mask_id_; }
  std::span<const TokenId> replacement_ids() const { return replacement_ids_; }

 private:
  TokenId mask_id_;
  std::vector<TokenId> replacement_ids_;
};

/// Every token inside a selected span becomes a masked position. Each one
/// independently becomes [MASK] with probability 0.8, a uniformly drawn
/// non-special id with probability 0.1, or stays unchanged. Labels keep
/// the original id in all three cases. Throws InvariantError when the plan
/// does not fit the sequence or covers a special token.
MaskedExample corrupt(std::span<const SubwordToken> tokens, const MaskPlan& plan,
                      Rng& rng, const CorruptionVocab& vocab);

/// 64-bit FNV-1a over the UTF-8 bytes of "<global_seed>|<doc_id>|<seq_index>"
/// with both integers in decimal.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view doc_id,
                          std::uint64_t seq_index);

}  // namespace selmask
