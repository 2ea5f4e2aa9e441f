#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "selmask/errors.hpp"
#include "selmask/scoring.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace selmask;

namespace {

CorpusStats stats_of(const std::vector<oracle::WordDoc>& word_docs) {
  const auto tokenizer = fixture::tokenizer_for(word_docs);
  return build_stats(fixture::to_documents(word_docs, tokenizer));
}

}  // namespace

TEST_CASE("a word once in every document scores exactly 1") {
  const auto stats = stats_of({{"a", {"court", "law"}},
                               {"b", {"court", "appeal", "appeal"}},
                               {"c", {"court"}},
                               {"d", {"tribunal", "court", "law", "law"}}});
  const auto table = metadis_score(stats);
  CHECK(table.lookup("", "court") == 1.0);
  CHECK(table.scope() == ScoreScope::kGlobal);
  CHECK(table.provenance() == Scorer::kMetaDis);
}

TEST_CASE("a word twice in one of four documents scores 0.125") {
  const auto stats = stats_of({{"a", {"appeal", "appeal"}}, {"b", {"court"}},
                               {"c", {"court"}}, {"d", {"court"}}});
  CHECK(metadis_score(stats).lookup("", "appeal") == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("metadis matches the brute-force formula on random corpora") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto word_docs = fixture::random_word_docs(gen, 10, 30);
    const auto expected = oracle::metadis(word_docs);
    const auto table = metadis_score(stats_of(word_docs));
    REQUIRE(table.global_entries().size() == expected.size());
    for (const auto& [word, s] : expected) {
      const double got = table.lookup("", word);
      CHECK(std::abs(got - s) <= 1e-12);
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
    table.validate();
  }
}

TEST_CASE("tfidf agrees with scikit-learn on a three-document corpus") {
  // TfidfVectorizer(analyzer=str.split) defaults, values frozen from
  // scikit-learn 1.7.2.
  struct Expected {
    const char* doc;
    const char* word;
    double score;
  };
  const Expected expected[] = {
      {"a", "appeal", 0.408248290463863},   {"a", "court", 0.816496580927726},
      {"a", "law", 0.408248290463863},      {"b", "law", 1.0},
      {"c", "appeal", 0.7710058432202013},  {"c", "court", 0.38550292161010064},
      {"c", "tribunal", 0.5068900148458076},
  };
  const auto stats = stats_of({{"a", {"court", "court", "law", "appeal"}},
                               {"b", {"law", "law", "law"}},
                               {"c", {"court", "appeal", "appeal", "tribunal"}}});
  const auto table = tfidf_score(stats);
  CHECK(table.size() == std::size(expected));
  for (const auto& e : expected) {
    CHECK(std::abs(table.lookup(e.doc, e.word) - e.score) <= 1e-9);
  }
  CHECK(table.lookup("b", "court") == 0.0);
}

TEST_CASE("tfidf edge cases") {
  SUBCASE("single document with one repeated word") {
    const auto table = tfidf_score(stats_of({{"d", {"law", "law", "law"}}}));
    CHECK(table.lookup("d", "law") == 1.0);
  }
  SUBCASE("a word in every document has idf 1") {
    CHECK(smoothed_idf(7, 7) == 1.0);
    CHECK(smoothed_idf(1, 1) == 1.0);
  }
  SUBCASE("empty documents get no entries") {
    const auto table = tfidf_score(stats_of({{"a", {}}, {"b", {"law"}}}));
    CHECK(table.document_entries().count("a") == 0);
    CHECK(table.lookup("a", "law") == 0.0);
    table.validate();
  }
}

TEST_CASE("tfidf matches the dense reference and has unit-norm rows") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto word_docs = fixture::random_word_docs(gen, 10, 20);
    const auto expected = oracle::tfidf(word_docs);
    const auto table = tfidf_score(stats_of(word_docs));
    REQUIRE(table.size() == expected.size());
    for (const auto& [key, s] : expected) {
      CHECK(std::abs(table.lookup(key.first, key.second) - s) <= 1e-9);
    }
    for (const auto& [doc, words] : table.document_entries()) {
      double sq = 0;
      for (const auto& [w, s] : words) sq += s * s;
      CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("duplicating every document keeps the idf ranking") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    auto word_docs = fixture::random_word_docs(gen, 8, 15);
    const auto before = stats_of(word_docs);
    const std::size_t n = word_docs.size();
    for (std::size_t i = 0; i < n; ++i) {
      word_docs.push_back({word_docs[i].id + "-copy", word_docs[i].words});
    }
    const auto after = stats_of(word_docs);

    auto order = [](const CorpusStats& s) {
      std::vector<std::pair<double, std::string>> v;
      for (const auto& [w, ws] : s.words()) {
        v.emplace_back(-smoothed_idf(s.num_documents(), ws.df()), w);
      }
      std::sort(v.begin(), v.end());
      std::vector<std::string> words;
      for (auto& [idf, w] : v) words.push_back(w);
      return words;
    };
    CHECK(order(before) == order(after));
  }
}

TEST_CASE("to_distribution") {
  CHECK(to_distribution(std::vector{2.0, 2.0}) == std::vector{0.5, 0.5});
  CHECK(to_distribution(std::vector{1.0, 3.0}) == std::vector{0.25, 0.75});
  const auto uniform = to_distribution(std::vector{0.0, 0.0, 0.0});
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(to_distribution(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(to_distribution(std::vector{1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(to_distribution(std::vector<double>{NAN}), std::invalid_argument);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> value(0.0, 1e6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> scores(1 + gen() % 40);
    for (auto& s : scores) s = (gen() % 4 == 0) ? 0.0 : value(gen);
    const auto p = to_distribution(scores);
    double sum = 0;
    for (double x : p) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("score tables round-trip bit-exactly") {
  ScoreTable table(ScoreScope::kGlobal, Scorer::kMetaDis, "0123456789abcdef");
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) table.set_global("w" + std::to_string(i), value(gen));
  table.set_global("quote\"and\\slash", 1.0 / 3.0);
  table.set_global("tiny", 5e-324);

  std::stringstream buf;
  write_table(table, buf);
  const auto back = read_table(buf, ScoreScope::kGlobal);
  REQUIRE(back.global_entries().size() == table.global_entries().size());
  for (const auto& [word, s] : table.global_entries()) {
    CHECK(std::bit_cast<std::uint64_t>(back.lookup("", word)) ==
          std::bit_cast<std::uint64_t>(s));
  }
  CHECK(back == table);

  const auto tfidf = tfidf_score(stats_of({{"a", {"x", "y", "y"}}, {"b", {"y", "z"}}}));
  std::stringstream buf2;
  write_table(tfidf, buf2);
  CHECK(read_table(buf2) == tfidf);
}

TEST_CASE("invalid score tables are rejected on load") {
  std::istringstream negative(
      "{\"scope\":\"global\",\"provenance\":\"metadis\",\"fingerprint\":\"x\"}\n"
      "{\"word\":\"a\",\"score\":-0.5}\n");
  CHECK_THROWS_AS(read_table(negative), DataError);

  std::istringstream global(
      "{\"scope\":\"global\",\"provenance\":\"metadis\",\"fingerprint\":\"x\"}\n"
      "{\"word\":\"a\",\"score\":0.5}\n");
  CHECK_THROWS_WITH_AS(read_table(global, ScoreScope::kPerDocument),
                       doctest::Contains("per-document"), DataError);

  std::istringstream not_unit(
      "{\"scope\":\"per-document\",\"provenance\":\"tfidf\",\"fingerprint\":\"x\"}\n"
      "{\"doc\":\"d\",\"word\":\"a\",\"score\":0.5}\n");
  CHECK_THROWS_AS(read_table(not_unit), DataError);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_table(empty), DataError);
}

TEST_CASE("fingerprint mismatch is detected but loading still succeeds") {
  fixture::TempDir dir("scores");
  const auto stats_a = stats_of({{"a", {"x", "y"}}});
  const auto stats_b = stats_of({{"a", {"x", "z"}}});
  const auto table = metadis_score(stats_a);
  save_table(table, dir.path() / "t.jsonl");
  CHECK(fingerprint_matches(table, stats_a));
  CHECK_FALSE(fingerprint_matches(table, stats_b));
  CHECK(load_table(dir.path() / "t.jsonl", std::nullopt, &stats_b) == table);
}

TEST_CASE("scoring an empty corpus is an error") {
  CorpusStats empty;
  CHECK_THROWS_AS(metadis_score(empty), DataError);
  CHECK_THROWS_AS(tfidf_score(empty), DataError);
}
