// selmask: corpus statistics, word scoring and selective masking.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "selmask/corpus.hpp"
#include "selmask/errors.hpp"
#include "selmask/pipeline.hpp"
#include "selmask/records.hpp"
#include "selmask/scoring.hpp"
#include "selmask/stats.hpp"
#include "selmask/tokenizer.hpp"

namespace fs = std::filesystem;
using namespace selmask;

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kData = 3, kInvariant = 4 };

struct Options {
  std::string corpus;
  std::string format = "jsonl";
  std::string tokenizer;
  std::string scorer = "metadis";
  std::string strategy = "topn";
  std::size_t max_seq_len = 512;
  std::uint64_t seed = 0;
  unsigned shuffle_rounds = 3;
  std::string out;
  std::size_t report_k = 50;
  unsigned threads = 1;
  std::string stats;
  std::string scores;
  std::string records;
  std::size_t min_count = 1;
  bool cased = false;
  std::string log_level = "info";
};

void add_corpus(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpus, "JSON-lines file or directory of .txt files");
  cmd->add_option("--format", o.format, "Corpus format")
      ->check(CLI::IsMember({"jsonl", "txtdir"}));
}

void add_scorer(CLI::App* cmd, Options& o) {
  cmd->add_option("--scorer", o.scorer, "Word scorer")
      ->check(CLI::IsMember({"metadis", "tfidf"}));
}

void add_masking(CLI::App* cmd, Options& o) {
  cmd->add_option("--strategy", o.strategy, "Word selection")
      ->check(CLI::IsMember({"rand", "topn", "classical"}));
  cmd->add_option("--max-seq-len", o.max_seq_len, "Sequence length including [CLS] and [SEP]");
  cmd->add_option("--seed", o.seed, "Global seed")->required();
  cmd->add_option("--shuffle-rounds", o.shuffle_rounds, "Dataset shuffle passes");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

std::vector<Document> load_tokenized(const Options& o, const WordPieceTokenizer& tokenizer) {
  require(o.corpus, "--corpus");
  auto docs = load_corpus(o.corpus, parse_corpus_format(o.format));
  tokenize_all(docs, tokenizer, o.threads);
  return docs;
}

WordPieceTokenizer load_tokenizer(const Options& o) {
  require(o.tokenizer, "--tokenizer");
  return WordPieceTokenizer::load(o.tokenizer);
}

int cmd_stats(const Options& o) {
  require(o.out, "--out");
  const auto tokenizer = load_tokenizer(o);
  const auto docs = load_tokenized(o, tokenizer);
  const auto stats = build_stats(docs, o.threads);
  stats.save(o.out);
  spdlog::info("{} documents, {} distinct words, fingerprint {}", stats.num_documents(),
               stats.words().size(), stats.fingerprint());
  return kOk;
}

int cmd_score(const Options& o) {
  require(o.out, "--out");
  CorpusStats stats;
  if (!o.stats.empty()) {
    stats = CorpusStats::load(o.stats);
  } else {
    const auto tokenizer = load_tokenizer(o);
    stats = build_stats(load_tokenized(o, tokenizer), o.threads);
  }
  auto table = compute_scores(stats, parse_scorer(o.scorer));
  table.validate();
  save_table(table, o.out);
  spdlog::info("{} scores written to {}", table.size(), o.out);
  return kOk;
}

int cmd_mask(const Options& o) {
  PipelineConfig config;
  config.corpus = o.corpus;
  config.tokenizer = o.tokenizer;
  config.out = o.out;
  config.seed = o.seed;
  config.max_seq_len = o.max_seq_len;
  config.threads = o.threads;
  config.validate();

  const auto selection = parse_selection(o.strategy);
  const auto tokenizer = load_tokenizer(o);
  const auto docs = load_tokenized(o, tokenizer);
  std::optional<ScoreTable> table;
  if (selection != Selection::kClassical) {
    require(o.scores, "--scores");
    const auto scorer = parse_scorer(o.scorer);
    const auto stats = build_stats(docs, o.threads);
    table = load_table(o.scores,
                       scorer == Scorer::kMetaDis ? ScoreScope::kGlobal : ScoreScope::kPerDocument,
                       &stats);
    table->validate();
  }

  MaskingOptions options;
  options.selection = selection;
  options.max_seq_len = o.max_seq_len;
  options.seed = o.seed;
  options.threads = o.threads;
  MaskingTotals totals;
  auto examples = mask_documents(docs, tokenizer, table ? &*table : nullptr, options, &totals);
  shuffle_dataset(examples, o.seed, o.shuffle_rounds);
  save_records(examples, o.out);
  spdlog::info("{} sequences, {} of {} tokens masked", totals.sequences, totals.masked_tokens,
               totals.content_tokens);
  return kOk;
}

int cmd_report(const Options& o) {
  require(o.records, "--records");
  const auto tokenizer = load_tokenizer(o);
  const auto examples = load_records(o.records);
  auto report = report_top_masked(examples, tokenizer.vocab(), o.report_k);
  const auto selection = parse_selection(o.strategy);
  const auto scorer = parse_scorer(o.scorer);
  report.scorer = to_string(scorer);
  report.strategy = strategy_name(scorer, selection);
  if (!o.corpus.empty()) {
    report.corpus_fingerprint =
        corpus_fingerprint(load_corpus(o.corpus, parse_corpus_format(o.format)));
  }
  if (o.out.empty() || o.out == "-") {
    write_report(report, std::cout);
  } else {
    save_report(report, o.out);
  }
  return kOk;
}

int cmd_run(const Options& o) {
  PipelineConfig config;
  config.corpus = o.corpus;
  config.format = parse_corpus_format(o.format);
  config.tokenizer = o.tokenizer;
  config.scorer = parse_scorer(o.scorer);
  config.selection = parse_selection(o.strategy);
  config.max_seq_len = o.max_seq_len;
  config.seed = o.seed;
  config.shuffle_rounds = o.shuffle_rounds;
  config.out = o.out;
  config.report_k = o.report_k;
  config.threads = o.threads;
  const auto result = run_pipeline(config);
  std::cout << (fs::path(o.out) / kManifestFile).string() << '\n';
  spdlog::info("strategy {}, config {}", result.report.strategy, result.config_hash);
  return kOk;
}

int cmd_vocab(const Options& o) {
  require(o.corpus, "--corpus");
  require(o.out, "--out");
  const auto docs = load_corpus(o.corpus, parse_corpus_format(o.format));
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);
  const auto vocab = build_vocabulary(texts, !o.cased, o.min_count);
  vocab.save(o.out);
  spdlog::info("{} tokens written to {}", vocab.size(), o.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("selmask"));

  CLI::App app{"Selective masking for domain-adaptive pre-training"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads; output is identical for any value")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error or off");

  auto* stats = app.add_subcommand("stats", "Count word frequencies per document");
  add_corpus(stats, o);
  stats->add_option("--tokenizer", o.tokenizer, "vocab.txt, tokenizer JSON or directory");
  stats->add_option("--out", o.out, "Statistics file to write");

  auto* score = app.add_subcommand("score", "Score words from statistics or a corpus");
  add_corpus(score, o);
  score->add_option("--tokenizer", o.tokenizer, "vocab.txt, tokenizer JSON or directory");
  score->add_option("--stats", o.stats, "Statistics file from `stats`");
  add_scorer(score, o);
  score->add_option("--out", o.out, "Score table to write");

  auto* mask = app.add_subcommand("mask", "Select and corrupt words, writing records");
  add_corpus(mask, o);
  mask->add_option("--tokenizer", o.tokenizer, "vocab.txt, tokenizer JSON or directory");
  mask->add_option("--scores", o.scores, "Score table from `score`");
  add_scorer(mask, o);
  add_masking(mask, o);
  mask->add_option("--out", o.out, "Records file to write");

  auto* report = app.add_subcommand("report", "Most frequently masked words");
  add_corpus(report, o);
  report->add_option("--records", o.records, "Records file from `mask`");
  report->add_option("--tokenizer", o.tokenizer, "Tokenizer the records were made with");
  add_scorer(report, o);
  report->add_option("--strategy", o.strategy, "Word selection used")
      ->check(CLI::IsMember({"rand", "topn", "classical"}));
  report->add_option("--report-k", o.report_k, "Number of words");
  report->add_option("--out", o.out, "Report file; stdout when omitted");

  auto* run = app.add_subcommand("run", "All stages into one output directory");
  add_corpus(run, o);
  run->add_option("--tokenizer", o.tokenizer, "vocab.txt, tokenizer JSON or directory");
  add_scorer(run, o);
  add_masking(run, o);
  run->add_option("--report-k", o.report_k, "Number of words in the report");
  run->add_option("--out", o.out, "Output directory");

  auto* vocab = app.add_subcommand("vocab", "Build a vocabulary from a corpus");
  add_corpus(vocab, o);
  vocab->add_option("--min-count", o.min_count, "Minimum count for a whole-word token");
  vocab->add_flag("--cased", o.cased, "Keep case");
  vocab->add_option("--out", o.out, "vocab.txt to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const auto level = spdlog::level::from_str(o.log_level);
    if (level == spdlog::level::off && o.log_level != "off") {
      throw ConfigError("unknown log level " + o.log_level);
    }
    spdlog::set_level(level);

    if (stats->parsed()) return cmd_stats(o);
    if (score->parsed()) return cmd_score(o);
    if (mask->parsed()) return cmd_mask(o);
    if (report->parsed()) return cmd_report(o);
    if (run->parsed()) return cmd_run(o);
    if (vocab->parsed()) return cmd_vocab(o);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kData;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInvariant;
  }
  return kInvariant;
}
