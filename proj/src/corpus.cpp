#include "selmask/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selmask/errors.hpp"
#include "selmask/hash.hpp"
#include "selmask/parallel.hpp"

namespace selmask {
namespace {

namespace fs = std::filesystem;

void sort_and_check_unique(std::vector<Document>& docs) {
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  auto dup = std::adjacent_find(
      docs.begin(), docs.end(),
      [](const Document& a, const Document& b) { return a.doc_id == b.doc_id; });
  if (dup != docs.end()) throw DataError("duplicate doc_id '" + dup->doc_id + "'");
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json-lines") return CorpusFormat::kJsonLines;
  if (name == "txtdir" || name == "plain-text-dir") return CorpusFormat::kTextDir;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::kJsonLines ? "jsonl" : "txtdir";
}

std::vector<Document> read_json_lines(std::istream& in, std::string_view source) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto fail = [&](const std::string& what) {
      return DataError(std::string(source) + ":" + std::to_string(line_no) +
                       ": " + what);
    };
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(std::string("invalid JSON (") + e.what() + ")");
    }
    if (!record.is_object()) throw fail("record is not a JSON object");
    for (const char* field : {"id", "text"}) {
      if (!record.contains(field)) {
        throw fail(std::string("missing field \"") + field + "\"");
      }
      if (!record[field].is_string()) {
        throw fail(std::string("field \"") + field + "\" is not a string");
      }
    }
    docs.push_back(Document{record["id"].get<std::string>(),
                            record["text"].get<std::string>(),
                            {}});
  }
  sort_and_check_unique(docs);
  return docs;
}

std::vector<Document> load_corpus(const fs::path& path, CorpusFormat format) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw DataError("corpus path does not exist: " + path.string());
  }
  if (format == CorpusFormat::kJsonLines) {
    if (fs::is_directory(path)) {
      throw DataError("expected a JSON-lines file, got directory " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return read_json_lines(in, path.string());
  }

  if (!fs::is_directory(path)) {
    throw DataError("expected a directory of .txt files: " + path.string());
  }
  std::vector<Document> docs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw DataError("cannot open " + entry.path().string());
    std::string text{std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>()};
    docs.push_back(Document{entry.path().filename().string(), std::move(text), {}});
  }
  sort_and_check_unique(docs);
  return docs;
}

void tokenize(Document& doc, const WordPieceTokenizer& tokenizer) {
  doc.tokens = tokenizer.tokenize(doc.text);
}

void tokenize_all(std::span<Document> docs, const WordPieceTokenizer& tokenizer,
                  unsigned threads) {
  parallel_for(docs.size(), threads,
               [&](std::size_t i) { tokenize(docs[i], tokenizer); });
}

std::string corpus_fingerprint(std::span<const Document> docs) {
  std::uint64_t h = kFnvOffset;
  for (const auto& d : docs) {
    // Length prefixes keep ("ab","c") distinct from ("a","bc").
    h = fnv1a64(std::to_string(d.doc_id.size()) + ":", h);
    h = fnv1a64(d.doc_id, h);
    h = fnv1a64(std::to_string(d.text.size()) + ":", h);
    h = fnv1a64(d.text, h);
  }
  return to_hex(h);
}

}  // namespace selmask
