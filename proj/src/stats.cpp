#include "selmask/stats.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "selmask/errors.hpp"
#include "selmask/hash.hpp"
#include "selmask/parallel.hpp"

namespace selmask {

CorpusStats CorpusStats::from_words(std::string doc_id,
                                    std::span<const WordSpan> words) {
  CorpusStats stats;
  for (const auto& w : words) {
    WordStats& ws = stats.words_[w.word];
    ++ws.tf;
    ++ws.dtf[doc_id];
  }
  stats.num_documents_ = 1;
  stats.doc_ids_.insert(std::move(doc_id));
  return stats;
}

void CorpusStats::merge(const CorpusStats& other) {
  for (const auto& id : other.doc_ids_) {
    if (doc_ids_.contains(id)) {
      throw DataError("document '" + id + "' counted twice");
    }
  }
  doc_ids_.insert(other.doc_ids_.begin(), other.doc_ids_.end());
  num_documents_ += other.num_documents_;
  for (const auto& [word, theirs] : other.words_) {
    WordStats& mine = words_[word];
    mine.tf += theirs.tf;
    for (const auto& [doc, count] : theirs.dtf) mine.dtf[doc] += count;
  }
}

const WordStats* CorpusStats::find(std::string_view word) const {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second;
}

void CorpusStats::validate() const {
  for (const auto& [word, ws] : words_) {
    auto fail = [&](const std::string& what) {
      return DataError("stats for '" + word + "': " + what);
    };
    const std::uint64_t sum = std::accumulate(
        ws.dtf.begin(), ws.dtf.end(), std::uint64_t{0},
        [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
    if (sum != ws.tf) throw fail("tf differs from sum of dtf");
    if (ws.df() < 1) throw fail("df < 1");
    if (ws.df() > ws.tf || ws.df() > num_documents_) {
      throw fail("df exceeds min(tf, N)");
    }
    for (const auto& [doc, count] : ws.dtf) {
      if (count == 0) throw fail("zero count for document '" + doc + "'");
      if (!doc_ids_.empty() && !doc_ids_.contains(doc)) {
        throw fail("unknown document '" + doc + "'");
      }
    }
  }
}

void CorpusStats::write(std::ostream& out) const {
  out << nlohmann::json{{"N", num_documents_}}.dump() << '\n';
  for (const auto& [word, ws] : words_) {
    nlohmann::json dtf = nlohmann::json::object();
    for (const auto& [doc, count] : ws.dtf) dtf[doc] = count;
    nlohmann::json rec = {{"word", word}, {"tf", ws.tf}, {"df", ws.df()},
                          {"dtf", std::move(dtf)}};
    out << rec.dump() << '\n';
  }
}

CorpusStats CorpusStats::read(std::istream& in) {
  CorpusStats stats;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto rec = nlohmann::json::parse(line);
      if (!have_header) {
        stats.num_documents_ = rec.at("N").get<std::uint64_t>();
        have_header = true;
        continue;
      }
      WordStats ws;
      ws.tf = rec.at("tf").get<std::uint64_t>();
      for (const auto& [doc, count] : rec.at("dtf").items()) {
        ws.dtf.emplace(doc, count.get<std::uint64_t>());
      }
      if (rec.at("df").get<std::uint64_t>() != ws.df()) {
        throw DataError("df differs from the size of dtf");
      }
      stats.words_.emplace(rec.at("word").get<std::string>(), std::move(ws));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("stats line " + std::to_string(line_no) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("stats line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw DataError("stats file lacks the {\"N\": ...} header");
  stats.validate();
  return stats;
}

void CorpusStats::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
}

CorpusStats CorpusStats::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read(in);
}

std::string CorpusStats::fingerprint() const {
  std::ostringstream s;
  write(s);
  return to_hex(fnv1a64(s.str()));
}

CorpusStats build_stats(std::span<const Document> docs, unsigned threads) {
  if (docs.empty()) {
    throw DataError("corpus has no documents; N = 0 leaves scores undefined");
  }
  std::vector<CorpusStats> partial(docs.size());
  parallel_for(docs.size(), threads, [&](std::size_t i) {
    partial[i] = CorpusStats::from_words(docs[i].doc_id,
                                         whole_words(docs[i].tokens));
  });
  CorpusStats total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace selmask
