#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selmask/tokenizer.hpp"

namespace selmask {

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<SubwordToken> tokens;  // empty until tokenized
};

enum class CorpusFormat { kJsonLines, kTextDir };

/// Accepts "jsonl"/"json-lines" and "txtdir"/"plain-text-dir".
CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// Loads documents sorted by doc_id. JSON-lines records need string fields
/// "id" and "text"; blank lines are skipped. In a text directory every
/// regular `*.txt` file is one document whose id is its file name.
///
/// Throws DataError on a missing path, a malformed record (the message
/// names the line) or a duplicate id.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  CorpusFormat format);

/// JSON-lines parsing on an open stream; `source` labels error messages.
std::vector<Document> read_json_lines(std::istream& in,
                                      std::string_view source = "<stream>");

void tokenize(Document& doc, const WordPieceTokenizer& tokenizer);
void tokenize_all(std::span<Document> docs, const WordPieceTokenizer& tokenizer,
                  unsigned threads = 1);

/// Hash over every (doc_id, text) pair in order.
std::string corpus_fingerprint(std::span<const Document> docs);

}  // namespace selmask
