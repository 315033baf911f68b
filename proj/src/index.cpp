#include "chronolens/index.hpp"

#include <algorithm>
#include <cmath>

#include "chronolens/errors.hpp"
#include "chronolens/resources.hpp"

namespace chronolens {

std::vector<Snippet> extract_snippets(const NewsArticle& article, const std::vector<Passage>& units,
                                      const std::vector<Mention>& mentions) {
  std::set<std::pair<std::size_t, std::string>> seen;
  std::vector<Snippet> out;
  for (const auto& m : mentions) {
    if (!m.resolved()) continue;
    if (!seen.emplace(m.sentence_index, m.entity_id).second) continue;
    out.push_back({m.entity_id, article.doc_id, m.sentence_index, units.at(m.sentence_index).text,
                   article.published_at});
  }
  std::sort(out.begin(), out.end(), [](const Snippet& a, const Snippet& b) {
    return std::tie(a.sentence_index, a.entity_id) < std::tie(b.sentence_index, b.entity_id);
  });
  return out;
}

Analyzer Analyzer::defaults() {
  auto words = text::parse_list(resources::stopwords());
  return Analyzer(text::WordSet(words.begin(), words.end()));
}

Analyzer Analyzer::from_file(const std::filesystem::path& path) {
  auto words = text::read_list_file(path);
  text::WordSet set;
  for (const auto& w : words) set.insert(text::lowercase(w));
  return Analyzer(std::move(set));
}

std::vector<std::string> Analyzer::terms(std::string_view s) const {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(s)) {
    if (!text::is_word(tok.text)) continue;
    auto lower = text::lowercase(tok.text);
    if (stopwords_.count(lower) == 0) out.push_back(std::move(lower));
  }
  return out;
}

std::uint64_t sum_in_span(const std::map<Day, std::uint32_t>& counts, const OptionalSpan& span) {
  if (!span) {
    std::uint64_t total = 0;
    for (const auto& [day, n] : counts) total += n;
    return total;
  }
  std::uint64_t total = 0;
  for (auto it = counts.lower_bound(span->from); it != counts.end() && it->first <= span->to; ++it) total += it->second;
  return total;
}

void EntityIndex::index_snippets(const std::vector<Snippet>& snippets) {
  for (const auto& s : snippets) {
    auto& doc = documents_[s.entity_id];
    doc.entity_id = s.entity_id;
    if (!doc.snippet_refs.insert({s.published_at, s.doc_id, s.sentence_index}).second) continue;
    const Day day = day_of(s.published_at);
    ++doc.snippets_by_day[day];
    const auto terms = analyzer_.terms(s.text);
    doc.length += terms.size();
    total_length_ += terms.size();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      ++terms_[terms[i]][s.entity_id][day];
      if (i + 1 < terms.size()) ++bigrams_[terms[i] + " " + terms[i + 1]][s.entity_id][day];
    }
  }
}

double EntityIndex::average_length() const noexcept {
  return documents_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(documents_.size());
}

std::size_t EntityIndex::document_frequency(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? 0 : it->second.size();
}

std::vector<SearchHit> EntityIndex::search(const QuerySpec& query) const {
  const auto sequence = analyzer_.terms(query.text);
  if (sequence.empty()) throw EmptyQuery("query has no indexable terms: '" + query.text + "'");
  const std::set<std::string> unique(sequence.begin(), sequence.end());
  std::set<std::string> pairs;
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) pairs.insert(sequence[i] + " " + sequence[i + 1]);

  const double n = static_cast<double>(documents_.size());
  const double avgdl = average_length();
  std::map<std::string, double> scores;
  for (const auto& term : unique) {
    auto it = terms_.find(term);
    if (it == terms_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& [entity, days] : it->second) {
      const double tf = static_cast<double>(sum_in_span(days, query.span));
      if (tf == 0) continue;
      const double dl = static_cast<double>(documents_.at(entity).length);
      const double norm = params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl);
      scores[entity] += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  if (params_.adjacency_bonus != 0.0) {
    for (const auto& pair : pairs) {
      auto it = bigrams_.find(pair);
      if (it == bigrams_.end()) continue;
      for (const auto& [entity, days] : it->second) {
        auto s = scores.find(entity);
        if (s == scores.end()) continue;
        const double count = static_cast<double>(sum_in_span(days, query.span));
        if (count > 0) s->second += params_.adjacency_bonus * std::log(1.0 + count);
      }
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(scores.size());
  for (const auto& [entity, score] : scores) hits.push_back({entity, score, documents_.at(entity).total_snippets()});
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.total_snippets != b.total_snippets) return a.total_snippets > b.total_snippets;
    return a.entity_id < b.entity_id;
  });
  if (hits.size() > query.limit) hits.resize(query.limit);
  return hits;
}

const EntityDocument* EntityIndex::document(std::string_view entity_id) const {
  auto it = documents_.find(std::string(entity_id));
  return it == documents_.end() ? nullptr : &it->second;
}

std::uint32_t EntityIndex::snippet_count(std::string_view entity_id, const OptionalSpan& span) const {
  const auto* doc = document(entity_id);
  return doc ? static_cast<std::uint32_t>(sum_in_span(doc->snippets_by_day, span)) : 0;
}

std::vector<TimelineBucket> EntityIndex::timeline(std::string_view entity_id, Granularity granularity,
                                                  const OptionalSpan& span) const {
  const auto* doc = document(entity_id);
  if (!doc) throw UnknownEntity("unknown entity '" + std::string(entity_id) + "'");
  DaySpan range{};
  if (span) range = *span;
  else if (doc->snippets_by_day.empty()) return {};
  else range = {doc->snippets_by_day.begin()->first, doc->snippets_by_day.rbegin()->first};
  if (range.from > range.to) throw InvalidSpan("timeline span start is after its end");

  std::vector<TimelineBucket> out;
  for (Day start = bucket_start(range.from, granularity); start <= range.to; start = next_bucket(start, granularity)) {
    const Day end = next_bucket(start, granularity) - 1;
    const DaySpan clipped{std::max(start, range.from), std::min(end, range.to)};
    out.push_back({start, bucket_label(start, granularity),
                   static_cast<std::uint32_t>(sum_in_span(doc->snippets_by_day, clipped))});
  }
  return out;
}

std::map<std::pair<std::string, Day>, std::uint32_t> EntityIndex::term_freqs_by_bucket(
    std::string_view entity_id) const {
  std::map<std::pair<std::string, Day>, std::uint32_t> out;
  const std::string id(entity_id);
  for (const auto& [term, entities] : terms_) {
    auto it = entities.find(id);
    if (it == entities.end()) continue;
    for (const auto& [day, n] : it->second) out[{term, day}] = n;
  }
  return out;
}

std::vector<Posting> EntityIndex::postings(std::string_view term) const {
  std::vector<Posting> out;
  auto it = terms_.find(std::string(term));
  if (it == terms_.end()) return out;
  for (const auto& [entity, days] : it->second)
    for (const auto& [day, n] : days) out.push_back({entity, day, n});
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot

namespace {

constexpr int kIndexVersion = 1;

nlohmann::json counts_to_json(const std::map<std::string, std::map<std::string, std::map<Day, std::uint32_t>>>& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [term, entities] : m) {
    auto arr = nlohmann::json::array();
    for (const auto& [entity, days] : entities)
      for (const auto& [day, n] : days) arr.push_back(nlohmann::json::array({entity, day, n}));
    out[term] = std::move(arr);
  }
  return out;
}

void counts_from_json(const nlohmann::json& j,
                      std::map<std::string, std::map<std::string, std::map<Day, std::uint32_t>>>& m) {
  for (const auto& [term, arr] : j.items()) {
    auto& entities = m[term];
    for (const auto& p : arr) {
      const auto n = p.at(2).get<std::uint32_t>();
      if (n == 0) throw SnapshotError("zero posting frequency for term '" + term + "'");
      entities[p.at(0).get<std::string>()][p.at(1).get<Day>()] = n;
    }
  }
}

} // namespace

nlohmann::json EntityIndex::to_json() const {
  std::vector<std::string> stop(analyzer_.stopwords().begin(), analyzer_.stopwords().end());
  std::sort(stop.begin(), stop.end());
  auto entities = nlohmann::json::array();
  for (const auto& [id, doc] : documents_) {
    auto refs = nlohmann::json::array();
    for (const auto& r : doc.snippet_refs) refs.push_back(nlohmann::json::array({r.published_at, r.doc_id, r.sentence_index}));
    entities.push_back({{"entity_id", id}, {"length", doc.length}, {"snippets", std::move(refs)}});
  }
  return {{"format", "chronolens-index"},
          {"version", kIndexVersion},
          {"params", {{"k1", params_.k1}, {"b", params_.b}, {"adjacency_bonus", params_.adjacency_bonus}}},
          {"stopwords", stop},
          {"entities", std::move(entities)},
          {"terms", counts_to_json(terms_)},
          {"bigrams", counts_to_json(bigrams_)}};
}

EntityIndex EntityIndex::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "chronolens-index") throw SnapshotError("not an index snapshot");
  if (j.value("version", 0) != kIndexVersion) throw SnapshotError("unsupported index snapshot version");
  const auto& p = j.at("params");
  RankingParams params{p.at("k1").get<double>(), p.at("b").get<double>(), p.at("adjacency_bonus").get<double>()};
  auto stop = j.at("stopwords").get<std::vector<std::string>>();
  EntityIndex index(Analyzer(text::WordSet(stop.begin(), stop.end())), params);
  for (const auto& e : j.at("entities")) {
    EntityDocument doc;
    doc.entity_id = e.at("entity_id").get<std::string>();
    doc.length = e.at("length").get<std::uint64_t>();
    for (const auto& r : e.at("snippets")) {
      SnippetRef ref{r.at(0).get<Timestamp>(), r.at(1).get<std::string>(), r.at(2).get<std::size_t>()};
      ++doc.snippets_by_day[day_of(ref.published_at)];
      doc.snippet_refs.insert(std::move(ref));
    }
    index.total_length_ += doc.length;
    index.documents_.emplace(doc.entity_id, std::move(doc));
  }
  counts_from_json(j.at("terms"), index.terms_);
  counts_from_json(j.at("bigrams"), index.bigrams_);
  return index;
}

} // namespace chronolens
