#include "chronolens/api.hpp"

#include <algorithm>
#include <charconv>

#include "chronolens/errors.hpp"

namespace chronolens {

std::uint64_t fnv1a(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

class HttpError : public Error {
public:
  HttpError(int status, std::string code, const std::string& message)
      : Error(std::move(code), message), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

int status_for(const Error& e) {
  const auto& c = e.code();
  if (c == "UnknownEntity") return 404;
  if (c == "InvalidSpan") return 422;
  if (c == "EmptyQuery" || c == "MalformedTimestamp" || c == "MalformedInput") return 400;
  return 500;
}

Response json_response(int status, const nlohmann::json& j) { return {status, j.dump() + "\n"}; }

Response error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, {{"code", code}, {"message", message}});
}

const std::string* param(const QueryParams& p, const std::string& name) {
  auto it = p.find(name);
  return it == p.end() || it->second.empty() ? nullptr : &it->second;
}

std::size_t size_param(const QueryParams& p, const std::string& name, std::size_t fallback, std::size_t max) {
  const auto* v = param(p, name);
  if (!v) return fallback;
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
  if (ec != std::errc{} || ptr != v->data() + v->size())
    throw MalformedInput("parameter '" + name + "' must be a non-negative integer, got '" + *v + "'");
  return std::min(n, max);
}

bool flag_param(const QueryParams& p, const std::string& name) {
  const auto* v = param(p, name);
  if (!v) return false;
  if (*v == "1" || *v == "true") return true;
  if (*v == "0" || *v == "false") return false;
  throw MalformedInput("parameter '" + name + "' must be true or false, got '" + *v + "'");
}

// Missing bounds extend to the archive's coverage.
OptionalSpan span_param(const QueryParams& p, const ArchiveState& s) {
  const auto* from = param(p, "from");
  const auto* to = param(p, "to");
  if (!from && !to) return std::nullopt;
  const auto coverage = s.coverage();
  DaySpan span{};
  if (from && to) {
    span = {parse_day(*from), parse_day(*to)};
  } else if (from) {
    span.from = parse_day(*from);
    span.to = coverage ? std::max(coverage->to, span.from) : span.from;
  } else {
    span.to = parse_day(*to);
    span.from = coverage ? std::min(coverage->from, span.to) : span.to;
  }
  if (span.from > span.to) throw InvalidSpan("span start " + format_day(span.from) + " is after its end " + format_day(span.to));
  return span;
}

nlohmann::json span_json(const OptionalSpan& span) {
  if (!span) return {{"from", nullptr}, {"to", nullptr}};
  return {{"from", format_day(span->from)}, {"to", format_day(span->to)}};
}

std::string name_of(const ArchiveState& s, const std::string& id) {
  const auto* p = s.registry.find(id);
  return p ? p->canonical_name : id;
}

std::string profession_of(const ArchiveState& s, const std::string& id) {
  const auto* p = s.registry.find(id);
  return p ? p->top_profession() : std::string();
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) parts.emplace_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return parts;
}

} // namespace

Response Api::handle(std::string_view method, std::string_view path, const QueryParams& params,
                     std::string_view body) const {
  try {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api") throw HttpError(404, "NotFound", "no route for " + std::string(path));
    const auto& route = parts[1];
    const bool get = method == "GET";

    if (route == "ingest" && parts.size() == 2) {
      if (method != "POST") throw HttpError(405, "MethodNotAllowed", "use POST for /api/ingest");
      return json_response(200, archive_.ingest(body).to_json());
    }
    const auto known = (route == "search" || route == "network" || route == "stats") && parts.size() == 2;
    const auto entity_route = route == "entity" && (parts.size() == 3 || (parts.size() == 4 && parts[3] == "quotes"));
    if (!known && !entity_route) throw HttpError(404, "NotFound", "no route for " + std::string(path));
    if (!get) throw HttpError(405, "MethodNotAllowed", "use GET for " + std::string(path));

    const auto snap = archive_.snapshot();
    if (route == "search") return json_response(200, search(*snap, params));
    if (route == "network") return json_response(200, network(*snap, params));
    if (route == "stats") return json_response(200, stats(*snap, params));
    if (parts.size() == 4) return json_response(200, entity_quotes(*snap, parts[2], params));
    return json_response(200, entity(*snap, parts[2], params));
  } catch (const HttpError& e) {
    return error_response(e.status(), e.code(), e.what());
  } catch (const Error& e) {
    return error_response(status_for(e), e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

nlohmann::json Api::search(const ArchiveState& s, const QueryParams& p) const {
  const auto* q = param(p, "q");
  if (!q) throw EmptyQuery("parameter 'q' is required");
  QuerySpec spec{*q, span_param(p, s), size_param(p, "limit", options_.default_limit, options_.max_limit)};
  auto results = nlohmann::json::array();
  for (const auto& hit : s.index.search(spec)) {
    results.push_back({{"entity_id", hit.entity_id},
                       {"canonical_name", name_of(s, hit.entity_id)},
                       {"profession", profession_of(s, hit.entity_id)},
                       {"score", hit.score},
                       {"snippet_count", s.index.snippet_count(hit.entity_id, spec.span)}});
  }
  return {{"query", *q}, {"span", span_json(spec.span)}, {"results", std::move(results)}};
}

nlohmann::json Api::entity(const ArchiveState& s, const std::string& id, const QueryParams& p) const {
  const auto* profile = s.registry.find(id);
  if (!profile) throw UnknownEntity("unknown entity '" + id + "'");
  const auto span = span_param(p, s);
  const auto* g = param(p, "granularity");
  const auto granularity = g ? parse_granularity(*g) : Granularity::day;

  std::vector<std::pair<std::string, std::uint32_t>> professions(profile->professions.begin(),
                                                                 profile->professions.end());
  std::stable_sort(professions.begin(), professions.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  auto prof = nlohmann::json::array();
  for (const auto& [name, n] : professions) prof.push_back({{"name", name}, {"count", n}});

  auto articles = nlohmann::json::array();
  if (auto it = s.snippets.find(id); it != s.snippets.end()) {
    for (const auto& snip : it->second) {
      if (!in_span(span, day_of(snip.published_at))) continue;
      if (articles.empty() || articles.back()["doc_id"] != snip.doc_id) {
        const auto& meta = s.articles.at(snip.doc_id);
        articles.push_back({{"doc_id", meta.doc_id},
                            {"title", meta.title},
                            {"source", meta.source},
                            {"category", meta.category},
                            {"published_at", format_timestamp(meta.published_at)},
                            {"snippets", nlohmann::json::array()}});
      }
      articles.back()["snippets"].push_back({{"sentence_index", snip.sentence_index}, {"text", snip.text}});
    }
  }

  auto quotes = nlohmann::json::array();
  if (auto it = s.quotations.find(id); it != s.quotations.end())
    for (const auto& q : it->second)
      if (in_span(span, day_of(q.published_at))) quotes.push_back(to_json(q));

  auto related = nlohmann::json::array();
  auto neighbors = s.graph.neighbors(id, span);
  if (neighbors.size() > options_.related_limit) neighbors.resize(options_.related_limit);
  for (const auto& [other, w] : neighbors)
    related.push_back({{"entity_id", other}, {"canonical_name", name_of(s, other)}, {"weight", w}});

  auto timeline = nlohmann::json::array();
  if (s.index.document(id)) {
    for (const auto& b : s.index.timeline(id, granularity, span))
      timeline.push_back({{"start", format_day(b.start)}, {"label", b.label}, {"count", b.count}});
  }

  return {{"entity_id", profile->entity_id},
          {"canonical_name", profile->canonical_name},
          {"aliases", profile->known_aliases},
          {"profession", profile->top_profession()},
          {"professions", std::move(prof)},
          {"first_seen", format_timestamp(profile->first_seen)},
          {"last_seen", format_timestamp(profile->last_seen)},
          {"mention_count", profile->mention_count},
          {"span", span_json(span)},
          {"granularity", to_string(granularity)},
          {"articles", std::move(articles)},
          {"quotations", std::move(quotes)},
          {"related", std::move(related)},
          {"timeline", std::move(timeline)}};
}

nlohmann::json Api::entity_quotes(const ArchiveState& s, const std::string& id, const QueryParams& p) const {
  if (!s.registry.find(id)) throw UnknownEntity("unknown entity '" + id + "'");
  const auto span = span_param(p, s);
  std::optional<QuoteKind> kind;
  if (const auto* k = param(p, "kind")) kind = parse_quote_kind(*k);
  auto quotes = nlohmann::json::array();
  if (auto it = s.quotations.find(id); it != s.quotations.end())
    for (const auto& q : it->second)
      if (in_span(span, day_of(q.published_at)) && (!kind || q.kind == *kind)) quotes.push_back(to_json(q));
  return {{"entity_id", id}, {"span", span_json(span)}, {"quotations", std::move(quotes)}};
}

nlohmann::json Api::network(const ArchiveState& s, const QueryParams& p) const {
  const auto span = span_param(p, s);
  const auto* entity = param(p, "entity");
  const LabelLookup label = [&](const std::string& id) { return name_of(s, id); };
  const auto view =
      entity ? s.graph.ego_network(*entity, span, size_param(p, "max_nodes", options_.default_max_nodes, 1000), label)
             : s.graph.global_network(span, size_param(p, "top_k", options_.default_top_k, 1000), label);
  if (!flag_param(p, "layout")) return to_json(view);

  auto params = options_.layout;
  const auto sj = span_json(span);
  params.seed = fnv1a("network|" + (entity ? *entity : std::string()) + "|" + sj["from"].dump() + "|" + sj["to"].dump());
  return to_json(view, run_layout(view, params));
}

nlohmann::json Api::stats(const ArchiveState& s, const QueryParams& p) const {
  const auto days = size_param(p, "days", static_cast<std::size_t>(options_.stats_days), 36600);
  const auto limit = size_param(p, "limit", options_.default_limit, options_.max_limit);
  const auto coverage = s.coverage();
  OptionalSpan window;
  auto top = nlohmann::json::array();
  if (coverage && days > 0) {
    window = DaySpan{coverage->to - static_cast<Day>(days) + 1, coverage->to};
    std::vector<std::pair<std::string, std::uint64_t>> ranked;
    for (const auto& [id, stats] : s.graph.nodes()) {
      const auto w = sum_in_span(stats.mentions, window);
      if (w > 0) ranked.emplace_back(id, w);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > limit) ranked.resize(limit);
    for (const auto& [id, w] : ranked)
      top.push_back({{"entity_id", id},
                     {"canonical_name", name_of(s, id)},
                     {"profession", profession_of(s, id)},
                     {"articles", w}});
  }
  return {{"generation", s.generation},
          {"articles", s.articles.size()},
          {"entities", s.registry.size()},
          {"quotations", s.quotation_count()},
          {"coverage", span_json(coverage)},
          {"window", span_json(window)},
          {"top_entities", std::move(top)}};
}

} // namespace chronolens
