#include "selmask/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "selmask/errors.hpp"
#include "utf8.hpp"

namespace selmask {
namespace {

namespace fs = std::filesystem;

bool looks_special(std::string_view token) {
  return token.size() >= 2 && token.front() == '[' && token.back() == ']';
}

bool is_whitespace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == 0x00A0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

// Control characters and the replacement character are dropped before
// splitting, as BERT's text cleanup does.
bool is_dropped(char32_t c) {
  if (c == U'\t' || c == U'\n' || c == U'\r') return false;
  return c == 0 || c == 0xFFFD || c < 0x20 || (c >= 0x7F && c <= 0x9F);
}

bool is_punctuation(char32_t c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  switch (c) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6:
    case 0x00B7: case 0x00BB: case 0x00BF:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if ((c >= 0x00C0 && c <= 0x00DE) && c != 0x00D7) return c + 32;
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 32;
  if (c >= 0x0410 && c <= 0x042F) return c + 32;
  if (c >= 0x0400 && c <= 0x040F) return c + 80;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    // First occurrence wins, matching how BERT vocab files are consumed.
    index_.emplace(tokens_[i], static_cast<TokenId>(i));
  }
}

Vocabulary Vocabulary::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  if (tokens.empty()) throw ConfigError("empty vocabulary " + path.string());
  return Vocabulary(std::move(tokens));
}

void Vocabulary::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::require(std::string_view surface) const {
  if (auto id = find(surface)) return *id;
  throw ConfigError("vocabulary lacks required token " + std::string(surface));
}

const std::string& Vocabulary::surface(TokenId id) const {
  if (!contains(id)) {
    throw DataError("token id " + std::to_string(id) + " outside vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::is_special(TokenId id) const {
  return looks_special(surface(id));
}

SubwordToken Vocabulary::token(TokenId id) const {
  const std::string& s = surface(id);
  const bool special = looks_special(s);
  return SubwordToken{id, s, special,
                      !special && s.starts_with(kContinuationPrefix)};
}

// ---------------------------------------------------------------------------
// WordPieceTokenizer

WordPieceTokenizer::WordPieceTokenizer(Vocabulary vocab, bool lowercase,
                                       std::size_t max_chars_per_word)
    : vocab_(std::move(vocab)),
      lowercase_(lowercase),
      max_chars_per_word_(max_chars_per_word),
      unk_id_(vocab_.require("[UNK]")),
      cls_id_(vocab_.require("[CLS]")),
      sep_id_(vocab_.require("[SEP]")),
      mask_id_(vocab_.require("[MASK]")) {}

WordPieceTokenizer WordPieceTokenizer::load(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw ConfigError("tokenizer path does not exist: " + path.string());
  }
  auto read_config = [](const fs::path& config_path, fs::path& vocab_path,
                        bool& lowercase) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open " + config_path.string());
    nlohmann::json cfg;
    try {
      in >> cfg;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed tokenizer config " + config_path.string() +
                        ": " + e.what());
    }
    if (cfg.contains("do_lower_case")) {
      if (!cfg["do_lower_case"].is_boolean()) {
        throw ConfigError("do_lower_case must be a boolean");
      }
      lowercase = cfg["do_lower_case"].get<bool>();
    }
    if (cfg.contains("vocab_file")) {
      if (!cfg["vocab_file"].is_string()) {
        throw ConfigError("vocab_file must be a string");
      }
      vocab_path = config_path.parent_path() /
                   cfg["vocab_file"].get<std::string>();
    }
  };

  bool lowercase = true;
  fs::path vocab_path;
  if (fs::is_directory(path)) {
    vocab_path = path / "vocab.txt";
    if (fs::exists(path / "tokenizer_config.json")) {
      read_config(path / "tokenizer_config.json", vocab_path, lowercase);
    }
  } else if (path.extension() == ".json") {
    read_config(path, vocab_path, lowercase);
    if (vocab_path.empty()) {
      throw ConfigError("tokenizer config lacks vocab_file: " + path.string());
    }
  } else {
    vocab_path = path;
  }
  return WordPieceTokenizer(Vocabulary::load(vocab_path), lowercase);
}

std::vector<std::string> WordPieceTokenizer::split_words(
    std::string_view text) const {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = utf8::decode(text, pos);
    pos += len;
    if (is_dropped(cp)) continue;
    if (is_whitespace(cp)) {
      flush();
    } else if (is_punctuation(cp)) {
      flush();
      utf8::append(current, cp);
      flush();
    } else {
      utf8::append(current, lowercase_ ? to_lower(cp) : cp);
    }
  }
  flush();
  return words;
}

std::vector<SubwordToken> WordPieceTokenizer::tokenize_word(
    std::string_view word) const {
  std::vector<std::size_t> boundaries;  // byte offsets of code points
  for (std::size_t pos = 0; pos < word.size();) {
    boundaries.push_back(pos);
    pos += utf8::decode(word, pos).length;
  }
  boundaries.push_back(word.size());
  const std::size_t chars = boundaries.size() - 1;

  if (chars == 0) return {};
  if (chars > max_chars_per_word_) return {vocab_.token(unk_id_)};

  std::vector<SubwordToken> pieces;
  std::size_t start = 0;
  while (start < chars) {
    std::optional<TokenId> match;
    std::size_t end = chars;
    for (; end > start; --end) {
      std::string candidate(word.substr(boundaries[start],
                                        boundaries[end] - boundaries[start]));
      if (start > 0) candidate.insert(0, kContinuationPrefix);
      match = vocab_.find(candidate);
      // A special entry never matches ordinary text.
      if (match && !vocab_.is_special(*match)) break;
      match.reset();
    }
    if (!match) return {vocab_.token(unk_id_)};
    SubwordToken piece = vocab_.token(*match);
    piece.is_continuation = start > 0;
    pieces.push_back(std::move(piece));
    start = end;
  }
  return pieces;
}

std::vector<SubwordToken> WordPieceTokenizer::tokenize(
    std::string_view text) const {
  std::vector<SubwordToken> out;
  for (const auto& word : split_words(text)) {
    auto pieces = tokenize_word(word);
    std::move(pieces.begin(), pieces.end(), std::back_inserter(out));
  }
  return out;
}

// ---------------------------------------------------------------------------

Vocabulary build_vocabulary(std::span<const std::string> texts, bool lowercase,
                            std::size_t min_word_count) {
  // Control tokens first so that a bootstrap tokenizer can split the texts.
  std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]",
                                     "[MASK]"};
  const WordPieceTokenizer splitter(Vocabulary(tokens), lowercase);

  std::map<std::string, std::size_t> counts;
  std::set<std::string> chars;
  for (const auto& text : texts) {
    for (auto& word : splitter.split_words(text)) {
      for (std::size_t pos = 0; pos < word.size();) {
        const auto len = utf8::decode(word, pos).length;
        chars.insert(word.substr(pos, len));
        pos += len;
      }
      ++counts[std::move(word)];
    }
  }
  std::set<std::string> seen(tokens.begin(), tokens.end());
  auto add = [&](std::string t) {
    if (seen.insert(t).second) tokens.push_back(std::move(t));
  };
  for (const auto& [word, count] : counts) {
    if (count >= min_word_count && !looks_special(word)) add(word);
  }
  for (const auto& c : chars) add(c);
  for (const auto& c : chars) add(std::string(kContinuationPrefix) + c);
  return Vocabulary(std::move(tokens));
}

}  // namespace selmask
