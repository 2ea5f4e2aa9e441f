#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace selmask {

using TokenId = std::int32_t;

inline constexpr std::string_view kContinuationPrefix = "##";

struct SubwordToken {
  TokenId id = 0;
  std::string surface;
  bool is_special = false;
  bool is_continuation = false;

  bool operator==(const SubwordToken&) const = default;
};

/// Id <-> surface mapping in BERT `vocab.txt` layout: one token per line,
/// the line number is the id. Any token written as `[...]` is special.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view surface) const;
  /// Throws ConfigError when the token is not in the vocabulary.
  TokenId require(std::string_view surface) const;
  bool contains(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }
  const std::string& surface(TokenId id) const;
  bool is_special(TokenId id) const;
  /// Full token record for an id; throws DataError when out of range.
  SubwordToken token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// BERT-style tokenizer: text cleanup, whitespace and punctuation
/// splitting, optional lowercasing, then greedy longest-match-first
/// WordPiece over each word. Words that cannot be covered by the vocabulary
/// become a single [UNK].
///
/// Lowercasing covers ASCII, Latin-1, Greek and basic Cyrillic capitals.
/// Accents are not stripped.
class WordPieceTokenizer {
 public:
  WordPieceTokenizer(Vocabulary vocab, bool lowercase,
                     std::size_t max_chars_per_word = 100);

  /// Accepts a `vocab.txt` file (lowercasing on), a JSON config
  /// {"vocab_file": ..., "do_lower_case": ...} with the vocab path relative
  /// to the config, or a directory holding `vocab.txt` and an optional
  /// `tokenizer_config.json`.
  static WordPieceTokenizer load(const std::filesystem::path& path);

  /// Splits and normalizes text into words without applying WordPiece.
  std::vector<std::string> split_words(std::string_view text) const;
  std::vector<SubwordToken> tokenize(std::string_view text) const;
  /// WordPiece for one already-normalized word.
  std::vector<SubwordToken> tokenize_word(std::string_view word) const;

  const Vocabulary& vocab() const { return vocab_; }
  bool lowercase() const { return lowercase_; }

  SubwordToken cls() const { return vocab_.token(cls_id_); }
  SubwordToken sep() const { return vocab_.token(sep_id_); }
  TokenId mask_id() const { return mask_id_; }
  TokenId unk_id() const { return unk_id_; }

 private:
  Vocabulary vocab_;
  bool lowercase_;
  std::size_t max_chars_per_word_;
  TokenId unk_id_;
  TokenId cls_id_;
  TokenId sep_id_;
  TokenId mask_id_;
};

/// Deterministic vocabulary for a corpus: the five control tokens, every
/// normalized word seen at least `min_word_count` times, then every single
/// code point both as a word start and as a `##` continuation. Rarer words
/// therefore tokenize into several pieces.
Vocabulary build_vocabulary(std::span<const std::string> texts, bool lowercase,
                            std::size_t min_word_count = 1);

}  // namespace selmask
