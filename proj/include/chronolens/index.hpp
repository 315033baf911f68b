#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronolens/ingest.hpp"
#include "chronolens/ner.hpp"
#include "chronolens/text.hpp"
#include "chronolens/time.hpp"

namespace chronolens {

struct Snippet {
  std::string entity_id;
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string text;
  Timestamp published_at = 0;

  friend bool operator==(const Snippet&, const Snippet&) = default;
};

/// One snippet per (entity, analysis unit) pair holding a resolved mention.
std::vector<Snippet> extract_snippets(const NewsArticle& article, const std::vector<Passage>& units,
                                      const std::vector<Mention>& mentions);

/// Term extraction shared by indexing and querying: word tokens, lowercased,
/// stopwords removed. Punctuation never becomes a term.
class Analyzer {
public:
  Analyzer() = default;
  explicit Analyzer(text::WordSet stopwords) : stopwords_(std::move(stopwords)) {}

  static Analyzer defaults();
  static Analyzer from_file(const std::filesystem::path& path);

  std::vector<std::string> terms(std::string_view text) const;
  bool is_stopword(std::string_view lowered) const { return stopwords_.count(std::string(lowered)) != 0; }
  const text::WordSet& stopwords() const noexcept { return stopwords_; }

private:
  text::WordSet stopwords_;
};

struct RankingParams {
  double k1 = 1.2;
  double b = 0.75;
  /// Added per adjacent query-term pair as bonus * ln(1 + in-span count of
  /// the pair occurring adjacently in the entity's term stream).
  double adjacency_bonus = 0.5;
};

struct QuerySpec {
  std::string text;
  OptionalSpan span;
  std::size_t limit = 10;
};

struct SearchHit {
  std::string entity_id;
  double score = 0;
  std::uint32_t total_snippets = 0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

struct SnippetRef {
  Timestamp published_at = 0;
  std::string doc_id;
  std::size_t sentence_index = 0;

  friend auto operator<=>(const SnippetRef&, const SnippetRef&) = default;
};

struct Posting {
  std::string entity_id;
  Day day = 0;
  std::uint32_t frequency = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct EntityDocument {
  std::string entity_id;
  std::set<SnippetRef> snippet_refs;
  std::map<Day, std::uint32_t> snippets_by_day;
  /// Number of indexed terms over all snippets.
  std::uint64_t length = 0;

  std::uint32_t total_snippets() const noexcept { return static_cast<std::uint32_t>(snippet_refs.size()); }
  friend bool operator==(const EntityDocument&, const EntityDocument&) = default;
};

struct TimelineBucket {
  Day start = 0;
  std::string label;
  std::uint32_t count = 0;

  friend bool operator==(const TimelineBucket&, const TimelineBucket&) = default;
};

/// Entity retrieval index: term -> entity -> UTC day -> frequency, plus the
/// per-entity documents. Ranking is BM25 over entity documents where only
/// term frequencies are restricted to the query span; document lengths,
/// document frequencies and the average length always cover the archive so
/// that narrowing a span can only lower a score.
class EntityIndex {
public:
  EntityIndex() = default;
  explicit EntityIndex(Analyzer analyzer, RankingParams params = {})
      : analyzer_(std::move(analyzer)), params_(params) {}

  /// Idempotent per (entity, doc_id, sentence_index); order-independent.
  void index_snippets(const std::vector<Snippet>& snippets);

  /// Throws EmptyQuery when no indexable term remains.
  std::vector<SearchHit> search(const QuerySpec& query) const;

  /// Throws UnknownEntity. Without a span the entity's own activity range
  /// is used. Zero-count buckets are included.
  std::vector<TimelineBucket> timeline(std::string_view entity_id, Granularity granularity,
                                       const OptionalSpan& span = std::nullopt) const;

  const EntityDocument* document(std::string_view entity_id) const;
  /// Number of snippets of the entity inside the span.
  std::uint32_t snippet_count(std::string_view entity_id, const OptionalSpan& span) const;
  /// Term frequencies of one entity keyed by (term, day).
  std::map<std::pair<std::string, Day>, std::uint32_t> term_freqs_by_bucket(std::string_view entity_id) const;

  std::vector<Posting> postings(std::string_view term) const;
  std::size_t document_frequency(std::string_view term) const;
  std::size_t entity_count() const noexcept { return documents_.size(); }
  std::size_t vocabulary_size() const noexcept { return terms_.size(); }
  double average_length() const noexcept;

  const Analyzer& analyzer() const noexcept { return analyzer_; }
  const RankingParams& params() const noexcept { return params_; }
  const std::map<std::string, EntityDocument>& documents() const noexcept { return documents_; }

  /// Snapshot document:
  ///   {"format": "chronolens-index", "version": 1,
  ///    "params": {"k1", "b", "adjacency_bonus"}, "stopwords": [...],
  ///    "entities": [{"entity_id", "length", "snippets": [[ts, doc_id, idx], ...]}],
  ///    "terms":   {term: [[entity_id, day, freq], ...]},
  ///    "bigrams": {"t1 t2": [[entity_id, day, freq], ...]}}
  nlohmann::json to_json() const;
  static EntityIndex from_json(const nlohmann::json& j);

  friend bool operator==(const EntityIndex& a, const EntityIndex& b) {
    return a.analyzer_.stopwords() == b.analyzer_.stopwords() && a.terms_ == b.terms_ && a.bigrams_ == b.bigrams_ &&
           a.documents_ == b.documents_ && a.total_length_ == b.total_length_;
  }

private:
  using DayCounts = std::map<Day, std::uint32_t>;
  using EntityCounts = std::map<std::string, DayCounts>;

  Analyzer analyzer_;
  RankingParams params_;
  std::map<std::string, EntityCounts> terms_;
  std::map<std::string, EntityCounts> bigrams_;
  std::map<std::string, EntityDocument> documents_;
  std::uint64_t total_length_ = 0;
};

/// Sums day counts inside an optional span.
std::uint64_t sum_in_span(const std::map<Day, std::uint32_t>& counts, const OptionalSpan& span);

} // namespace chronolens
