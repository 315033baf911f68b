#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chronolens/index.hpp"
#include "chronolens/time.hpp"
#include "fixtures.hpp"

// Brute-force recomputations used as test oracles. None of them touch the
// library's index or graph structures: they scan flat record lists.
namespace chronolens::testing {

/// One (entity, analysis unit) incidence with the unit's terms.
struct OracleRecord {
  std::string entity_id;
  std::string doc_id;
  std::size_t unit = 0;
  Day day = 0;
  Timestamp published_at = 0;
  std::string text;
  std::vector<std::string> terms;
};

std::vector<OracleRecord> records_from_gold(const std::vector<GoldArticle>& gold);

/// The snippets the pipeline must produce, in (entity, published_at,
/// doc_id, unit) order.
std::vector<Snippet> expected_snippets(const std::vector<GoldArticle>& gold);

/// term -> (entity, day) -> frequency.
using TermCounts = std::map<std::string, std::map<std::pair<std::string, Day>, std::uint32_t>>;
TermCounts expected_postings(const std::vector<OracleRecord>& records);

/// BM25 over entity documents made of raw snippet terms, evaluated by a
/// full scan per query: term frequencies and adjacent-pair counts are
/// restricted to the span, lengths and document frequencies are not.
class BruteForceBm25 {
public:
  BruteForceBm25(std::vector<OracleRecord> records, RankingParams params);

  struct Hit {
    std::string entity_id;
    double score = 0;
    std::uint32_t total_snippets = 0;
  };
  /// Ordered by score desc, total snippets desc, entity id asc.
  std::vector<Hit> rank(const std::vector<std::string>& query_terms, const OptionalSpan& span) const;

private:
  std::vector<OracleRecord> records_;
  RankingParams params_;
};

/// Article-level co-occurrence counts.
struct GraphCounts {
  std::map<std::string, std::map<Day, std::uint32_t>> nodes;
  std::map<std::pair<std::string, std::string>, std::map<Day, std::uint32_t>> edges;

  std::uint32_t node(const std::string& id, const OptionalSpan& span) const;
  std::uint32_t edge(const std::string& a, const std::string& b, const OptionalSpan& span) const;
};

struct OracleArticle {
  Day day = 0;
  std::string category;
  std::vector<std::string> entities; ///< may repeat
};

GraphCounts recount_graph(const std::vector<OracleArticle>& articles);
std::vector<OracleArticle> graph_articles_from_gold(const std::vector<GoldArticle>& gold);

} // namespace chronolens::testing
