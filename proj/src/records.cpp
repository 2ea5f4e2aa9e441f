#include "selmask/records.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "selmask/errors.hpp"
#include "selmask/segmentation.hpp"

namespace selmask {

using nlohmann::ordered_json;

void write_records(std::span<const MaskedExample> examples, std::ostream& out) {
  for (const auto& ex : examples) {
    ordered_json rec;
    rec["doc"] = ex.doc_id;
    rec["seq"] = ex.seq_index;
    rec["ids"] = ex.original_ids;
    rec["corrupted"] = ex.corrupted_ids;
    rec["masked"] = ex.masked_positions;
    rec["labels"] = ex.labels;
    out << rec.dump() << '\n';
  }
}

std::vector<MaskedExample> read_records(std::istream& in) {
  std::vector<MaskedExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      return DataError("record line " + std::to_string(line_no) + ": " + what);
    };
    MaskedExample ex;
    try {
      const auto rec = nlohmann::json::parse(line);
      ex.doc_id = rec.at("doc").get<std::string>();
      ex.seq_index = rec.at("seq").get<std::size_t>();
      ex.original_ids = rec.at("ids").get<std::vector<TokenId>>();
      ex.corrupted_ids = rec.at("corrupted").get<std::vector<TokenId>>();
      ex.masked_positions = rec.at("masked").get<std::vector<std::size_t>>();
      ex.labels = rec.at("labels").get<std::vector<TokenId>>();
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (ex.corrupted_ids.size() != ex.original_ids.size()) {
      throw fail("\"corrupted\" and \"ids\" differ in length");
    }
    if (ex.labels.size() != ex.masked_positions.size()) {
      throw fail("\"labels\" and \"masked\" differ in length");
    }
    for (std::size_t i = 0; i < ex.masked_positions.size(); ++i) {
      const std::size_t pos = ex.masked_positions[i];
      if (pos >= ex.original_ids.size()) throw fail("masked position out of range");
      if (i > 0 && pos <= ex.masked_positions[i - 1]) {
        throw fail("\"masked\" is not strictly ascending");
      }
      if (ex.labels[i] != ex.original_ids[pos]) {
        throw fail("label differs from original id at " + std::to_string(pos));
      }
    }
    for (std::size_t pos = 0; pos < ex.original_ids.size(); ++pos) {
      if (ex.corrupted_ids[pos] != ex.original_ids[pos] &&
          !std::binary_search(ex.masked_positions.begin(), ex.masked_positions.end(),
                              pos)) {
        throw fail("unmasked position " + std::to_string(pos) + " was altered");
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

void save_records(std::span<const MaskedExample> examples,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_records(examples, out);
}

std::vector<MaskedExample> load_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_records(in);
}

// ---------------------------------------------------------------------------

std::map<std::string, std::uint64_t> count_masked_words(
    std::span<const MaskedExample> examples, const Vocabulary& vocab) {
  std::map<std::string, std::uint64_t> counts;
  std::vector<SubwordToken> tokens;
  for (const auto& ex : examples) {
    if (ex.masked_positions.empty()) continue;
    tokens.clear();
    for (TokenId id : ex.original_ids) tokens.push_back(vocab.token(id));
    for (const auto& w : whole_words(tokens)) {
      auto first = std::lower_bound(ex.masked_positions.begin(),
                                    ex.masked_positions.end(), w.start);
      if (first != ex.masked_positions.end() && *first < w.end()) ++counts[w.word];
    }
  }
  return counts;
}

MaskReport report_top_masked(std::span<const MaskedExample> examples,
                             const Vocabulary& vocab, std::size_t k) {
  MaskReport report;
  report.k = k;
  const auto counts = count_masked_words(examples, vocab);
  report.entries.assign(counts.begin(), counts.end());
  // Map order is lexicographic already; a stable sort keeps it for ties.
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (report.entries.size() > k) report.entries.resize(k);
  return report;
}

void write_report(const MaskReport& report, std::ostream& out) {
  ordered_json j;
  j["scorer"] = report.scorer;
  j["strategy"] = report.strategy;
  j["corpus_fingerprint"] = report.corpus_fingerprint;
  j["k"] = report.k;
  j["words"] = ordered_json::array();
  for (const auto& [word, count] : report.entries) {
    ordered_json e;
    e["word"] = word;
    e["count"] = count;
    j["words"].push_back(std::move(e));
  }
  out << j.dump(2) << '\n';
}

MaskReport read_report(std::istream& in) {
  MaskReport report;
  try {
    const auto j = nlohmann::json::parse(in);
    report.scorer = j.at("scorer").get<std::string>();
    report.strategy = j.at("strategy").get<std::string>();
    report.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    report.k = j.at("k").get<std::size_t>();
    for (const auto& e : j.at("words")) {
      report.entries.emplace_back(e.at("word").get<std::string>(),
                                  e.at("count").get<std::uint64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  for (std::size_t i = 1; i < report.entries.size(); ++i) {
    if (report.entries[i].second > report.entries[i - 1].second) {
      throw DataError("report counts are not in descending order");
    }
  }
  return report;
}

void save_report(const MaskReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_report(report, out);
}

MaskReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_report(in);
}

}  // namespace selmask
