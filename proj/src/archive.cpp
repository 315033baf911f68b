#include "chronolens/archive.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chronolens/errors.hpp"
#include "chronolens/snapshot.hpp"

namespace chronolens {

PipelineConfig PipelineConfig::load(const std::filesystem::path& dir) {
  PipelineConfig config;
  auto has = [&](const char* name) { return std::filesystem::is_regular_file(dir / name); };
  if (has("abbreviations.txt")) config.segmenter = Segmenter::from_file(dir / "abbreviations.txt");
  if (has("stopwords.txt")) config.analyzer = Analyzer::from_file(dir / "stopwords.txt");
  if (has("quote_patterns.conf")) config.quotes = QuotePatterns::from_file(dir / "quote_patterns.conf");
  if (has("ner_patterns.conf")) config.ner = NerPatterns::from_file(dir / "ner_patterns.conf");
  if (has("gazetteer.tsv")) config.gazetteer = Gazetteer::from_file(dir / "gazetteer.tsv");
  if (has("model.tsv")) config.model = SequenceModel::load(dir / "model.tsv");
  return config;
}

nlohmann::json to_json(const ArticleMeta& meta) {
  return {{"doc_id", meta.doc_id},
          {"source", meta.source},
          {"category", meta.category},
          {"title", meta.title},
          {"published_at", format_timestamp(meta.published_at)},
          {"entities", meta.entities}};
}

ArticleMeta article_meta_from_json(const nlohmann::json& j) {
  ArticleMeta meta;
  meta.doc_id = j.at("doc_id").get<std::string>();
  meta.source = j.at("source").get<std::string>();
  meta.category = j.at("category").get<std::string>();
  meta.title = j.at("title").get<std::string>();
  meta.published_at = parse_timestamp(j.at("published_at").get<std::string>());
  meta.entities = j.at("entities").get<std::set<std::string>>();
  return meta;
}

std::optional<DaySpan> ArchiveState::coverage() const {
  if (articles.empty()) return std::nullopt;
  DaySpan span{day_of(articles.begin()->second.published_at), day_of(articles.begin()->second.published_at)};
  for (const auto& [id, meta] : articles) {
    const Day d = day_of(meta.published_at);
    span.from = std::min(span.from, d);
    span.to = std::max(span.to, d);
  }
  return span;
}

std::size_t ArchiveState::quotation_count() const {
  std::size_t n = 0;
  for (const auto& [id, qs] : quotations) n += qs.size();
  return n;
}

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  articles += other.articles;
  mentions += other.mentions;
  resolved_mentions += other.resolved_mentions;
  entities_created += other.entities_created;
  snippets += other.snippets;
  quotations += other.quotations;
  edges_touched += other.edges_touched;
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  return *this;
}

nlohmann::json IngestReport::to_json() const {
  auto errs = nlohmann::json::array();
  for (const auto& e : errors)
    errs.push_back({{"line", e.line}, {"doc_id", e.doc_id}, {"code", e.code}, {"message", e.message}});
  return {{"articles", articles},
          {"mentions", mentions},
          {"resolved_mentions", resolved_mentions},
          {"entities_created", entities_created},
          {"snippets", snippets},
          {"quotations", quotations},
          {"edges_touched", edges_touched},
          {"errors", std::move(errs)}};
}

std::vector<std::pair<std::size_t, RawDocument>> parse_jsonl(std::string_view payload,
                                                             std::vector<IngestError>& errors) {
  std::vector<std::pair<std::size_t, RawDocument>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    auto nl = payload.find('\n', pos);
    if (nl == std::string_view::npos) nl = payload.size();
    const auto line = payload.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; })) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(line_no, raw_document_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      errors.push_back({line_no, "", "MalformedInput", "line " + std::to_string(line_no) + ": " + e.what()});
    } catch (const Error& e) {
      errors.push_back({line_no, "", e.code(), "line " + std::to_string(line_no) + ": " + e.what()});
    }
  }
  return out;
}

std::vector<std::vector<Tag>> tag_units(const std::vector<Passage>& units, const PipelineConfig& config) {
  std::vector<std::vector<Tag>> tags;
  tags.reserve(units.size());
  for (const auto& unit : units) {
    auto tokens = token_texts(unit.tokens);
    auto dict = dictionary_annotate(tokens, config.gazetteer).tags;
    if (config.model) tags.push_back(merge_annotations(config.model->tag(tokens), dict));
    else tags.push_back(std::move(dict));
  }
  return tags;
}

namespace {

// Everything after cleaning is infallible, so a failing document never
// leaves the state half-updated.
void ingest_article(ArchiveState& state, const NewsArticle& article, const PipelineConfig& config,
                    IngestReport& report) {
  const auto units = analysis_units(article, config.segmenter);
  const auto tags = tag_units(units, config);
  auto mentions = extract_mentions(article.doc_id, units, tags);
  const auto stats = disambiguate(mentions, units, state.registry, config.ner, article.published_at,
                                  config.gazetteer.empty() ? nullptr : &config.gazetteer);

  const auto snippets = extract_snippets(article, units, mentions);
  state.index.index_snippets(snippets);
  for (const auto& s : snippets) {
    auto& list = state.snippets[s.entity_id];
    const auto key = [](const Snippet& x) { return std::tie(x.published_at, x.doc_id, x.sentence_index); };
    list.insert(std::upper_bound(list.begin(), list.end(), s, [&](const Snippet& a, const Snippet& b) {
                  return key(a) < key(b);
                }),
                s);
  }

  const auto quotes = extract_quotations(article, units, mentions, config.quotes);
  for (const auto& q : quotes) state.quotations[q.entity_id].push_back(q);

  ArticleMeta meta{article.doc_id, article.source, article.category, article.title, article.published_at, {}};
  for (const auto& m : mentions)
    if (m.resolved()) meta.entities.insert(m.entity_id);
  const std::vector<std::string> entities(meta.entities.begin(), meta.entities.end());
  report.edges_touched += state.graph.update(day_of(article.published_at), article.category, entities);
  state.articles.emplace(article.doc_id, std::move(meta));

  ++report.articles;
  report.mentions += mentions.size();
  report.resolved_mentions += stats.resolved;
  report.entities_created += stats.entities_created;
  report.snippets += snippets.size();
  report.quotations += quotes.size();
}

} // namespace

std::pair<ArchiveState, IngestReport> ingest_batch(const ArchiveState& state,
                                                   const std::vector<std::pair<std::size_t, RawDocument>>& docs,
                                                   const PipelineConfig& config) {
  ArchiveState next = state;
  IngestReport report;
  for (const auto& [line, raw] : docs) {
    if (next.articles.count(raw.doc_id) != 0) {
      report.errors.push_back({line, raw.doc_id, "DuplicateDocument", "document '" + raw.doc_id + "' is already archived"});
      continue;
    }
    NewsArticle article;
    try {
      article = clean_article(raw, config.segmenter, config.cleaner);
    } catch (const Error& e) {
      report.errors.push_back({line, raw.doc_id, e.code(), "line " + std::to_string(line) + ": " + e.what()});
      continue;
    }
    ingest_article(next, article, config, report);
  }
  if (report.articles == 0) return {state, std::move(report)};
  ++next.generation;
  return {std::move(next), std::move(report)};
}

std::pair<ArchiveState, IngestReport> ingest_batch(const ArchiveState& state, std::string_view jsonl,
                                                   const PipelineConfig& config) {
  std::vector<IngestError> errors;
  const auto docs = parse_jsonl(jsonl, errors);
  auto result = ingest_batch(state, docs, config);
  auto& report_errors = result.second.errors;
  report_errors.insert(report_errors.begin(), errors.begin(), errors.end());
  std::stable_sort(report_errors.begin(), report_errors.end(),
                   [](const IngestError& a, const IngestError& b) { return a.line < b.line; });
  return result;
}

// ---------------------------------------------------------------------------

Archive::Archive(PipelineConfig config)
    : config_(std::move(config)), current_(std::make_shared<const ArchiveState>(config_)) {}

Archive::Archive(const std::filesystem::path& dir) : config_(PipelineConfig::load(dir)), dir_(dir) {
  if (auto loaded = load_snapshot(dir)) current_ = std::make_shared<const ArchiveState>(std::move(*loaded));
  else current_ = std::make_shared<const ArchiveState>(config_);
}

std::shared_ptr<const ArchiveState> Archive::snapshot() const {
  std::lock_guard lock(publish_mutex_);
  return current_;
}

void Archive::publish(std::shared_ptr<const ArchiveState> next) {
  std::lock_guard lock(publish_mutex_);
  current_ = std::move(next);
}

IngestReport Archive::ingest(std::string_view jsonl) {
  std::lock_guard writer(writer_mutex_);
  const auto base = snapshot();
  auto [next, report] = ingest_batch(*base, jsonl, config_);
  if (next.generation != base->generation) {
    if (dir_) save_snapshot(next, *dir_);
    publish(std::make_shared<const ArchiveState>(std::move(next)));
  }
  return report;
}

IngestReport Archive::ingest_file(const std::filesystem::path& path) { return ingest(text::read_file(path)); }

} // namespace chronolens
