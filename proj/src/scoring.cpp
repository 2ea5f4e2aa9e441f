#include "selmask/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "selmask/errors.hpp"

namespace selmask {
namespace {

constexpr double kNormTolerance = 1e-9;

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ScoreScope parse_scope(std::string_view s) {
  if (s == "global") return ScoreScope::kGlobal;
  if (s == "per-document") return ScoreScope::kPerDocument;
  throw DataError("unknown score scope '" + std::string(s) + "'");
}

}  // namespace

Scorer parse_scorer(std::string_view name) {
  if (name == "metadis") return Scorer::kMetaDis;
  if (name == "tfidf") return Scorer::kTfIdf;
  throw ConfigError("unknown scorer '" + std::string(name) + "'");
}

std::string_view to_string(Scorer scorer) {
  return scorer == Scorer::kMetaDis ? "metadis" : "tfidf";
}

std::string_view to_string(ScoreScope scope) {
  return scope == ScoreScope::kGlobal ? "global" : "per-document";
}

// ---------------------------------------------------------------------------
// ScoreTable

ScoreTable::ScoreTable(ScoreScope scope, Scorer provenance, std::string fingerprint)
    : scope_(scope), provenance_(provenance), fingerprint_(std::move(fingerprint)) {}

double ScoreTable::lookup(std::string_view doc_id, std::string_view word) const {
  if (scope_ == ScoreScope::kGlobal) {
    auto it = global_.find(word);
    return it == global_.end() ? 0.0 : it->second;
  }
  auto doc = per_doc_.find(doc_id);
  if (doc == per_doc_.end()) return 0.0;
  auto it = doc->second.find(word);
  return it == doc->second.end() ? 0.0 : it->second;
}

void ScoreTable::set_global(std::string word, double score) {
  if (scope_ != ScoreScope::kGlobal) {
    throw std::logic_error("set_global on a per-document table");
  }
  global_[std::move(word)] = score;
}

void ScoreTable::set(std::string doc_id, std::string word, double score) {
  if (scope_ != ScoreScope::kPerDocument) {
    throw std::logic_error("per-document set on a global table");
  }
  per_doc_[std::move(doc_id)][std::move(word)] = score;
}

std::size_t ScoreTable::size() const {
  std::size_t n = global_.size();
  for (const auto& [doc, words] : per_doc_) n += words.size();
  return n;
}

void ScoreTable::validate() const {
  auto check_value = [](std::string_view word, double s) {
    if (!std::isfinite(s) || s < 0.0) {
      throw DataError("score for '" + std::string(word) + "' is " +
                      format_score(s) + "; scores must be finite and >= 0");
    }
  };
  if (provenance_ == Scorer::kMetaDis) {
    if (scope_ != ScoreScope::kGlobal) {
      throw DataError("metadis tables must have global scope");
    }
    for (const auto& [word, s] : global_) {
      check_value(word, s);
      if (s > 1.0) throw DataError("metadis score above 1 for '" + word + "'");
    }
    return;
  }
  if (scope_ != ScoreScope::kPerDocument) {
    throw DataError("tfidf tables must have per-document scope");
  }
  for (const auto& [doc, words] : per_doc_) {
    double sq = 0.0;
    for (const auto& [word, s] : words) {
      check_value(word, s);
      sq += s * s;
    }
    if (!words.empty() && std::abs(std::sqrt(sq) - 1.0) > kNormTolerance) {
      throw DataError("tfidf vector of document '" + doc + "' is not unit norm");
    }
  }
}

// ---------------------------------------------------------------------------
// Scorers

ScoreTable metadis_score(const CorpusStats& stats) {
  if (stats.num_documents() == 0) {
    throw DataError("metadis score needs at least one document");
  }
  ScoreTable table(ScoreScope::kGlobal, Scorer::kMetaDis, stats.fingerprint());
  const double n_docs = static_cast<double>(stats.num_documents());
  for (const auto& [word, ws] : stats.words()) {
    const double df = static_cast<double>(ws.df());
    const double tf = static_cast<double>(ws.tf);
    if (ws.df() == 0 || ws.tf == 0) {
      throw InvariantError("word '" + word + "' has no occurrences");
    }

    const double mean = tf / df;
    double sq_dev = 0.0;
    std::uint64_t max_count = 0;
    for (const auto& [doc, count] : ws.dtf) {
      const double d = static_cast<double>(count) - mean;
      sq_dev += d * d;
      max_count = std::max(max_count, count);
    }
    const double std_dev = ws.df() == 1 ? 0.0 : std::sqrt(sq_dev / df);

    // Population std of nonnegative counts is at most max/2.
    const double spread = 1.0 - std_dev / static_cast<double>(max_count);
    const double s = (df / tf) * spread * (df / n_docs);
    table.set_global(word, s);
  }
  return table;
}

ScoreTable tfidf_score(const CorpusStats& stats) {
  if (stats.num_documents() == 0) {
    throw DataError("tfidf score needs at least one document");
  }
  ScoreTable table(ScoreScope::kPerDocument, Scorer::kTfIdf, stats.fingerprint());
  std::map<std::string, ScoreTable::WordScores, std::less<>> raw;
  for (const auto& [word, ws] : stats.words()) {
    const double idf = smoothed_idf(stats.num_documents(), ws.df());
    for (const auto& [doc, count] : ws.dtf) {
      raw[doc][word] = static_cast<double>(count) * idf;
    }
  }
  for (auto& [doc, words] : raw) {
    double sq = 0.0;
    for (const auto& [word, w] : words) sq += w * w;
    const double norm = std::sqrt(sq);
    for (auto& [word, w] : words) table.set(doc, word, w / norm);
  }
  return table;
}

double smoothed_idf(std::uint64_t n_docs, std::uint64_t df) {
  return std::log((1.0 + static_cast<double>(n_docs)) /
                  (1.0 + static_cast<double>(df))) +
         1.0;
}

ScoreTable compute_scores(const CorpusStats& stats, Scorer scorer) {
  return scorer == Scorer::kMetaDis ? metadis_score(stats) : tfidf_score(stats);
}

std::vector<double> to_distribution(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("empty score vector");
  double sum = 0.0;
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument("scores must be finite and nonnegative");
    }
    sum += s;
  }
  std::vector<double> p(scores.size());
  if (sum > 0.0) {
    std::transform(scores.begin(), scores.end(), p.begin(),
                   [sum](double s) { return s / sum; });
  } else {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(scores.size()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Serialization

void write_table(const ScoreTable& table, std::ostream& out) {
  out << nlohmann::json{{"scope", to_string(table.scope())},
                        {"provenance", to_string(table.provenance())},
                        {"fingerprint", table.fingerprint()}}
             .dump()
      << '\n';
  // Keys go through the JSON encoder for escaping; the score is appended
  // by hand to pin the digit count.
  auto quoted = [](const std::string& s) { return nlohmann::json(s).dump(); };
  if (table.scope() == ScoreScope::kGlobal) {
    for (const auto& [word, s] : table.global_entries()) {
      out << "{\"word\":" << quoted(word) << ",\"score\":" << format_score(s)
          << "}\n";
    }
    return;
  }
  for (const auto& [doc, words] : table.document_entries()) {
    for (const auto& [word, s] : words) {
      out << "{\"doc\":" << quoted(doc) << ",\"word\":" << quoted(word)
          << ",\"score\":" << format_score(s) << "}\n";
    }
  }
}

ScoreTable read_table(std::istream& in, std::optional<ScoreScope> expected_scope) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<ScoreTable> table;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto rec = nlohmann::json::parse(line);
      if (!table) {
        const ScoreScope scope = parse_scope(rec.at("scope").get<std::string>());
        if (expected_scope && scope != *expected_scope) {
          throw DataError("expected a " + std::string(to_string(*expected_scope)) +
                          " table, found " + std::string(to_string(scope)));
        }
        Scorer provenance;
        try {
          provenance = parse_scorer(rec.at("provenance").get<std::string>());
        } catch (const ConfigError& e) {
          throw DataError(e.what());
        }
        table.emplace(scope, provenance, rec.at("fingerprint").get<std::string>());
        continue;
      }
      const double score = rec.at("score").get<double>();
      if (table->scope() == ScoreScope::kGlobal) {
        table->set_global(rec.at("word").get<std::string>(), score);
      } else {
        table->set(rec.at("doc").get<std::string>(),
                   rec.at("word").get<std::string>(), score);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("score table line " + std::to_string(line_no) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("score table line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!table) throw DataError("score table has no header line");
  table->validate();
  return std::move(*table);
}

void save_table(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_table(table, out);
}

ScoreTable load_table(const std::filesystem::path& path,
                      std::optional<ScoreScope> expected_scope,
                      const CorpusStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  ScoreTable table = read_table(in, expected_scope);
  if (stats != nullptr && !fingerprint_matches(table, *stats)) {
    spdlog::warn("score table {} was built from different corpus statistics "
                 "(table {}, corpus {})",
                 path.string(), table.fingerprint(), stats->fingerprint());
  }
  return table;
}

bool fingerprint_matches(const ScoreTable& table, const CorpusStats& stats) {
  return table.fingerprint() == stats.fingerprint();
}

}  // namespace selmask
