#include "selmask/pipeline.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "selmask/errors.hpp"
#include "selmask/hash.hpp"
#include "selmask/parallel.hpp"
#include "selmask/stats.hpp"

namespace selmask {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Unit {
  std::size_t start;
  std::size_t length;
};

// Word units for chunking: a word start with its continuations, or a
// lone special token.
std::vector<Unit> word_units(std::span<const SubwordToken> tokens) {
  std::vector<Unit> units;
  bool open = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (!t.is_special && t.is_continuation && open) {
      ++units.back().length;
      continue;
    }
    units.push_back({i, 1});
    open = !t.is_special;
  }
  return units;
}

template <typename Fn>
auto run_stage(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  auto label = [&](const std::exception& e) {
    return std::string(stage) + ": " + e.what();
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(label(e));
  } catch (const DataError& e) {
    throw DataError(label(e));
  } catch (const InvariantError& e) {
    throw InvariantError(label(e));
  } catch (const fs::filesystem_error& e) {
    throw DataError(label(e));
  } catch (const std::exception& e) {
    throw InvariantError(label(e));
  }
}

ordered_json config_json(const PipelineConfig& c) {
  ordered_json j;
  j["corpus"] = c.corpus.generic_string();
  j["format"] = to_string(c.format);
  j["tokenizer"] = c.tokenizer.generic_string();
  j["scorer"] = to_string(c.scorer);
  j["strategy"] = to_string(c.selection);
  j["max_seq_len"] = c.max_seq_len;
  j["seed"] = c.seed.value_or(0);
  j["shuffle_rounds"] = c.shuffle_rounds;
  j["report_k"] = c.report_k;
  return j;
}

}  // namespace

std::vector<std::vector<SubwordToken>> chunk(std::span<const SubwordToken> tokens,
                                             std::size_t max_seq_len,
                                             const SubwordToken& cls,
                                             const SubwordToken& sep) {
  if (max_seq_len < 3) {
    throw ConfigError("max_seq_len must leave room for content tokens");
  }
  const std::size_t window = max_seq_len - 2;
  const auto units = word_units(tokens);

  std::vector<std::vector<SubwordToken>> out;
  std::size_t u = 0;
  while (u < units.size()) {
    std::vector<SubwordToken> seq;
    seq.reserve(std::min(window, tokens.size()) + 2);
    seq.push_back(cls);
    if (units[u].length > window) {
      const auto first = tokens.begin() + static_cast<std::ptrdiff_t>(units[u].start);
      seq.insert(seq.end(), first, first + static_cast<std::ptrdiff_t>(window));
      ++u;
    } else {
      std::size_t used = 0;
      while (u < units.size() && used + units[u].length <= window) {
        const auto first = tokens.begin() + static_cast<std::ptrdiff_t>(units[u].start);
        seq.insert(seq.end(), first, first + static_cast<std::ptrdiff_t>(units[u].length));
        used += units[u].length;
        ++u;
      }
    }
    seq.push_back(sep);
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<std::size_t> shuffle_permutation(std::size_t count, std::uint64_t seed,
                                             unsigned rounds) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_dataset(order, seed, rounds);
  return order;
}

std::vector<MaskedExample> mask_documents(std::span<const Document> docs,
                                          const WordPieceTokenizer& tokenizer,
                                          const ScoreTable* table,
                                          const MaskingOptions& options,
                                          MaskingTotals* totals) {
  if (table == nullptr && options.selection != Selection::kClassical) {
    throw ConfigError("strategy '" + std::string(to_string(options.selection)) +
                      "' needs a score table");
  }
  const ScoreTable no_scores(ScoreScope::kGlobal, Scorer::kMetaDis, "");
  const ScoreTable& scores = table ? *table : no_scores;
  const auto vocab = CorruptionVocab::from(tokenizer.vocab(), tokenizer.mask_id());
  const SubwordToken cls = tokenizer.cls();
  const SubwordToken sep = tokenizer.sep();

  std::vector<std::vector<std::vector<SubwordToken>>> windows(docs.size());
  parallel_for(docs.size(), options.threads, [&](std::size_t d) {
    windows[d] = chunk(docs[d].tokens, options.max_seq_len, cls, sep);
  });

  struct Job {
    std::size_t doc;
    std::size_t seq;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t s = 0; s < windows[d].size(); ++s) jobs.push_back({d, s});
  }

  std::vector<MaskedExample> examples(jobs.size());
  std::vector<MaskPlan> plans(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    const Document& doc = docs[jobs[i].doc];
    auto& tokens = windows[jobs[i].doc][jobs[i].seq];
    const std::uint64_t seed = derive_seed(options.seed, doc.doc_id, jobs[i].seq);

    ScoredSequence scored = make_scored_sequence(doc.doc_id, std::move(tokens), scores);
    Rng rng(seed);
    MaskPlan plan = select_words(scored, options.selection, rng);
    plan.seed = seed;
    if (20 * plan.masked_tokens() > 3 * plan.content_tokens) {
      throw InvariantError("mask plan for " + doc.doc_id + "#" +
                           std::to_string(jobs[i].seq) + " exceeds the 15% budget");
    }
    MaskedExample ex = corrupt(scored.tokens, plan, rng, vocab);
    ex.doc_id = doc.doc_id;
    ex.seq_index = jobs[i].seq;
    examples[i] = std::move(ex);
    plans[i] = std::move(plan);
  });

  if (totals != nullptr) {
    *totals = MaskingTotals{};
    totals->sequences = examples.size();
    for (const auto& p : plans) {
      totals->content_tokens += p.content_tokens;
      totals->masked_tokens += p.masked_tokens();
      totals->selected_spans += p.selected.size();
    }
  }
  return examples;
}

void PipelineConfig::validate() const {
  if (corpus.empty()) throw ConfigError("--corpus is required");
  if (tokenizer.empty()) throw ConfigError("--tokenizer is required");
  if (out.empty()) throw ConfigError("--out is required");
  if (!seed) throw ConfigError("--seed is required");
  if (max_seq_len < 8) throw ConfigError("--max-seq-len must be at least 8");
  if (threads == 0) throw ConfigError("--threads must be at least 1");
}

std::string config_hash(const PipelineConfig& config) {
  return to_hex(fnv1a64(config_json(config).dump()));
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  PipelineResult result;

  const auto tokenizer = run_stage("tokenizer", [&] {
    return WordPieceTokenizer::load(config.tokenizer);
  });
  auto docs = run_stage("load", [&] { return load_corpus(config.corpus, config.format); });
  run_stage("tokenize", [&] { tokenize_all(docs, tokenizer, config.threads); });
  const auto stats = run_stage("stats", [&] { return build_stats(docs, config.threads); });
  const auto table = run_stage("score", [&] {
    ScoreTable t = compute_scores(stats, config.scorer);
    t.validate();
    return t;
  });

  MaskingOptions options;
  options.selection = config.selection;
  options.max_seq_len = config.max_seq_len;
  options.seed = *config.seed;
  options.threads = config.threads;
  auto examples = run_stage("mask", [&] {
    return mask_documents(docs, tokenizer, &table, options, &result.totals);
  });
  shuffle_dataset(examples, *config.seed, config.shuffle_rounds);

  result.documents = docs.size();
  result.corpus_fingerprint = corpus_fingerprint(docs);
  result.stats_fingerprint = stats.fingerprint();
  result.config_hash = config_hash(config);
  result.report = run_stage("report", [&] {
    MaskReport r = report_top_masked(examples, tokenizer.vocab(), config.report_k);
    r.scorer = to_string(config.scorer);
    r.strategy = strategy_name(config.scorer, config.selection);
    r.corpus_fingerprint = result.corpus_fingerprint;
    return r;
  });

  ordered_json manifest;
  manifest["config"] = config_json(config);
  manifest["config_hash"] = result.config_hash;
  manifest["strategy"] = result.report.strategy;
  manifest["corpus_fingerprint"] = result.corpus_fingerprint;
  manifest["stats_fingerprint"] = result.stats_fingerprint;
  manifest["counts"] = {{"documents", result.documents},
                        {"sequences", result.totals.sequences},
                        {"content_tokens", result.totals.content_tokens},
                        {"masked_tokens", result.totals.masked_tokens},
                        {"selected_spans", result.totals.selected_spans},
                        {"score_entries", table.size()}};
  manifest["files"] = {{"scores", kScoresFile},
                       {"records", kRecordsFile},
                       {"report", kReportFile}};

  // Everything is in memory; a failure while writing removes all outputs.
  const fs::path out = config.out;
  const fs::path files[] = {out / kScoresFile, out / kRecordsFile, out / kReportFile,
                            out / kManifestFile};
  try {
    run_stage("write", [&] {
      fs::create_directories(out);
      save_table(table, files[0]);
      save_records(examples, files[1]);
      save_report(result.report, files[2]);
      std::ofstream m(files[3], std::ios::binary);
      if (!m) throw DataError("cannot write " + files[3].string());
      m << manifest.dump(2) << '\n';
      if (!m) throw DataError("failed writing " + files[3].string());
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& f : files) fs::remove(f, ec);
    throw;
  }
  spdlog::info("{} documents, {} sequences, {} of {} tokens masked", result.documents,
               result.totals.sequences, result.totals.masked_tokens,
               result.totals.content_tokens);
  return result;
}

}  // namespace selmask
