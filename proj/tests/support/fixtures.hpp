#pragma once

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "selmask/corpus.hpp"
#include "selmask/segmentation.hpp"
#include "selmask/tokenizer.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline selmask::SubwordToken tok(std::string surface, selmask::TokenId id = 10) {
  const bool special = surface.size() > 1 && surface.front() == '[' && surface.back() == ']';
  const bool cont = !special && surface.starts_with("##");
  return {id, std::move(surface), special, cont};
}

// [CLS] + words of the given lengths (as a start and continuation pieces)
// + [SEP], with the given scores.
inline selmask::ScoredSequence sequence_of(const std::vector<std::size_t>& lengths,
                                          const std::vector<double>& scores) {
  selmask::ScoredSequence seq;
  seq.doc_id = "d";
  seq.tokens.push_back(tok("[CLS]", 2));
  for (std::size_t w = 0; w < lengths.size(); ++w) {
    const std::string base = "w" + std::to_string(w);
    seq.tokens.push_back(tok(base, 10));
    for (std::size_t k = 1; k < lengths[w]; ++k) seq.tokens.push_back(tok("##x", 11));
  }
  seq.tokens.push_back(tok("[SEP]", 3));
  seq.words = selmask::whole_words(seq.tokens);
  seq.scores = scores;
  return seq;
}

inline selmask::ScoredSequence random_sequence(std::mt19937_64& gen, std::size_t max_words) {
  const std::size_t n_words = gen() % (max_words + 1);
  std::vector<std::size_t> lengths;
  std::vector<double> scores;
  for (std::size_t i = 0; i < n_words; ++i) {
    lengths.push_back(1 + gen() % 4);
    // Coarse values make ties common; zeros exercise the uniform fallback.
    scores.push_back(static_cast<double>(gen() % 5) / 4.0);
  }
  return sequence_of(lengths, scores);
}

inline std::vector<selmask::SubwordToken> toks(std::initializer_list<const char*> surfaces) {
  std::vector<selmask::SubwordToken> out;
  selmask::TokenId id = 10;
  for (const char* s : surfaces) out.push_back(tok(s, id++));
  return out;
}

inline selmask::WordPieceTokenizer tokenizer_for(const std::vector<std::string>& texts,
                                                 std::size_t min_count = 1) {
  return selmask::WordPieceTokenizer(selmask::build_vocabulary(texts, true, min_count),
                                     true);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("selmask-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

// Up to max_docs documents of at most max_len words from a pool of up to
// max_words distinct lowercase words; some documents may be empty.
inline std::vector<oracle::WordDoc> random_word_docs(std::mt19937_64& gen,
                                                     std::size_t max_docs,
                                                     std::size_t max_words,
                                                     std::size_t max_len = 30) {
  std::uniform_int_distribution<std::size_t> n_docs(1, max_docs);
  std::uniform_int_distribution<std::size_t> n_pool(1, max_words);
  const std::size_t pool_size = n_pool(gen);
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < pool_size; ++i) {
    std::string w = "w";
    for (std::size_t v = i;; v /= 26) {
      w.push_back(static_cast<char>('a' + v % 26));
      if (v < 26) break;
    }
    pool.push_back(w);
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool_size - 1);
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::vector<oracle::WordDoc> docs(n_docs(gen));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    docs[d].id = "doc" + std::to_string(d);
    const std::size_t n = len(gen);
    for (std::size_t i = 0; i < n; ++i) docs[d].words.push_back(pool[pick(gen)]);
  }
  return docs;
}

inline std::vector<selmask::Document> to_documents(
    const std::vector<oracle::WordDoc>& word_docs,
    const selmask::WordPieceTokenizer& tokenizer) {
  std::vector<selmask::Document> docs;
  for (const auto& wd : word_docs) {
    selmask::Document d{wd.id, join(wd.words), {}};
    selmask::tokenize(d, tokenizer);
    docs.push_back(std::move(d));
  }
  return docs;
}

inline selmask::WordPieceTokenizer tokenizer_for(const std::vector<oracle::WordDoc>& docs) {
  std::vector<std::string> texts;
  for (const auto& d : docs) texts.push_back(join(d.words));
  return tokenizer_for(texts);
}

// Synthetic legal-flavoured corpus. Filler words follow a Zipf law over a
// generated lexicon (exponent 0 gives uniform filler). With `plant` set,
// every document also holds five genre markers exactly once (maximal genre
// score) and one document-specific topic word `topic_repeats` times (high
// TF x IDF in that document only).
struct ToyCorpus {
  std::vector<std::pair<std::string, std::string>> docs;  // id, text
  std::vector<std::string> genre_words;
  std::vector<std::string> topic_words;  // one per document
};

struct ToyOptions {
  std::size_t n_docs = 10;
  std::size_t words_per_doc = 100;
  std::uint64_t seed = 1;
  bool plant = true;
  std::size_t lexicon_size = 400;
  double zipf = 1.0;
  std::size_t topic_repeats = 5;
  bool punctuate = true;
};

inline ToyCorpus make_toy_corpus(const ToyOptions& opt) {
  static const char* syllables[] = {"ka", "lo", "mi", "ne", "ru", "sa", "te", "vo",
                                    "pa", "di", "gu", "fe", "zo", "bi", "ha", "ju"};
  std::vector<std::string> lexicon = {"the", "court", "of", "and", "to", "in",
                                      "a", "law", "that", "article", "applicant",
                                      "decision", "shall", "be", "by", "appeal"};
  std::mt19937_64 gen(opt.seed);
  for (std::size_t i = 0; lexicon.size() < opt.lexicon_size; ++i) {
    std::string w = std::string(syllables[i % 16]) + syllables[(i / 16) % 16] +
                    syllables[(i / 256 + i) % 16];
    if (i >= 4096) w += syllables[(i / 4096) % 16];
    if (std::find(lexicon.begin(), lexicon.end(), w) == lexicon.end()) lexicon.push_back(w);
  }
  std::vector<double> weights;
  for (std::size_t r = 0; r < lexicon.size(); ++r) {
    weights.push_back(std::pow(r + 1.0, -opt.zipf));
  }
  std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());

  ToyCorpus corpus;
  if (opt.plant) {
    corpus.genre_words = {"pursuant", "hereinafter", "notwithstanding", "whereas",
                          "adjudged"};
  }
  for (std::size_t d = 0; d < opt.n_docs; ++d) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < opt.words_per_doc; ++i) words.push_back(lexicon[zipf(gen)]);
    if (opt.plant) {
      std::string topic = "topic";
      topic.push_back(static_cast<char>('a' + d / 26 % 26));
      topic.push_back(static_cast<char>('a' + d % 26));
      corpus.topic_words.push_back(topic);
      std::vector<std::string> inserts(corpus.genre_words);
      inserts.insert(inserts.end(), opt.topic_repeats, topic);
      for (const auto& w : inserts) {
        std::uniform_int_distribution<std::size_t> at(0, words.size());
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(gen)), w);
      }
    }
    // Sentence case and full stops every dozen words.
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::string w = words[i];
      if (i % 12 == 0) w[0] = static_cast<char>(std::toupper(w[0]));
      text += w;
      const bool stop = opt.punctuate && (i % 12 == 11 || i + 1 == words.size());
      text += stop ? ". " : " ";
    }
    char id[16];
    std::snprintf(id, sizeof id, "case-%03zu", d);
    corpus.docs.emplace_back(id, text);
  }
  return corpus;
}

inline ToyCorpus make_toy_corpus(std::size_t n_docs, std::size_t words_per_doc,
                                 std::uint64_t seed, bool plant) {
  ToyOptions opt;
  opt.n_docs = n_docs;
  opt.words_per_doc = words_per_doc;
  opt.seed = seed;
  opt.plant = plant;
  return make_toy_corpus(opt);
}

inline void write_jsonl(const ToyCorpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& [id, text] : corpus.docs) {
    out << nlohmann::json{{"id", id}, {"text", text}}.dump() << '\n';
  }
}

// Vocabulary where words seen fewer than three times split into pieces.
inline void write_vocab(const ToyCorpus& corpus, const fs::path& path) {
  std::vector<std::string> texts;
  for (const auto& [id, text] : corpus.docs) texts.push_back(text);
  selmask::build_vocabulary(texts, true, 3).save(path);
}

}  // namespace fixture
