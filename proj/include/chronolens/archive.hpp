#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronolens/graph.hpp"
#include "chronolens/index.hpp"
#include "chronolens/ingest.hpp"
#include "chronolens/ner.hpp"
#include "chronolens/quotes.hpp"

namespace chronolens {

/// Everything the ingestion pipeline needs besides the archive itself.
struct PipelineConfig {
  Segmenter segmenter = Segmenter::with_defaults();
  CleanerConfig cleaner;
  Gazetteer gazetteer;
  /// When present, its tags are merged with the dictionary tags (the
  /// dictionary wins on overlap); otherwise only the dictionary tags.
  std::optional<SequenceModel> model;
  NerPatterns ner = NerPatterns::defaults();
  QuotePatterns quotes = QuotePatterns::defaults();
  Analyzer analyzer = Analyzer::defaults();
  RankingParams ranking;

  /// Built-in defaults, overridden by whichever of these files exist in
  /// `dir`: abbreviations.txt, stopwords.txt, quote_patterns.conf,
  /// ner_patterns.conf, gazetteer.tsv, model.tsv.
  static PipelineConfig load(const std::filesystem::path& dir);
};

struct ArticleMeta {
  std::string doc_id;
  std::string source;
  std::string category;
  std::string title;
  Timestamp published_at = 0;
  /// Resolved entities of the article.
  std::set<std::string> entities;

  friend bool operator==(const ArticleMeta&, const ArticleMeta&) = default;
};

nlohmann::json to_json(const ArticleMeta& meta);
ArticleMeta article_meta_from_json(const nlohmann::json& j);

/// One consistent generation of every derived structure.
struct ArchiveState {
  std::uint64_t generation = 0;
  EntityRegistry registry;
  EntityIndex index;
  CoocGraph graph;
  /// Per entity, in ingestion order.
  std::map<std::string, std::vector<Quotation>> quotations;
  /// Per entity, ordered by (published_at, doc_id, sentence_index).
  std::map<std::string, std::vector<Snippet>> snippets;
  std::map<std::string, ArticleMeta> articles;

  explicit ArchiveState(const PipelineConfig& config = {}) : index(config.analyzer, config.ranking) {}

  std::optional<DaySpan> coverage() const;
  std::size_t quotation_count() const;

  friend bool operator==(const ArchiveState&, const ArchiveState&) = default;
};

struct IngestError {
  std::size_t line = 0; ///< 1-based line (or position) in the batch
  std::string doc_id;
  std::string code;
  std::string message;
};

struct IngestReport {
  std::size_t articles = 0;
  std::size_t mentions = 0;
  std::size_t resolved_mentions = 0;
  std::size_t entities_created = 0;
  std::size_t snippets = 0;
  std::size_t quotations = 0;
  std::size_t edges_touched = 0;
  std::vector<IngestError> errors;

  IngestReport& operator+=(const IngestReport& other);
  nlohmann::json to_json() const;
};

/// Each input line is parsed independently; blank lines are skipped.
/// Returns documents paired with their 1-based line number and collects
/// malformed lines into `errors`.
std::vector<std::pair<std::size_t, RawDocument>> parse_jsonl(std::string_view payload, std::vector<IngestError>& errors);

/// Runs clean → segment → tag → disambiguate → snippets/index → quotes →
/// graph over every document, in batch order, on a copy of `state`.
/// Documents whose doc_id is already archived (or repeated in the batch)
/// are rejected. The generation advances only when something was ingested.
std::pair<ArchiveState, IngestReport> ingest_batch(const ArchiveState& state,
                                                   const std::vector<std::pair<std::size_t, RawDocument>>& docs,
                                                   const PipelineConfig& config);
std::pair<ArchiveState, IngestReport> ingest_batch(const ArchiveState& state, std::string_view jsonl,
                                                   const PipelineConfig& config);

/// Per-sentence tags for one article's analysis units.
std::vector<std::vector<Tag>> tag_units(const std::vector<Passage>& units, const PipelineConfig& config);

/// Published archive with single-writer ingestion. Readers take a snapshot
/// pointer and never observe a partially ingested batch.
class Archive {
public:
  explicit Archive(PipelineConfig config = {});
  /// Loads configuration and, if present, the persisted snapshot from `dir`;
  /// every successful ingest is persisted back there.
  explicit Archive(const std::filesystem::path& dir);

  Archive(const Archive&) = delete;
  Archive& operator=(const Archive&) = delete;

  std::shared_ptr<const ArchiveState> snapshot() const;
  IngestReport ingest(std::string_view jsonl);
  IngestReport ingest_file(const std::filesystem::path& path);

  const PipelineConfig& config() const noexcept { return config_; }
  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

private:
  void publish(std::shared_ptr<const ArchiveState> next);

  PipelineConfig config_;
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex publish_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const ArchiveState> current_;
};

} // namespace chronolens
