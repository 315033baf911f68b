#include "chronolens/quotes.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "chronolens/errors.hpp"
#include "chronolens/resources.hpp"

namespace chronolens {

std::string_view to_string(QuoteKind kind) noexcept { return kind == QuoteKind::direct ? "direct" : "indirect"; }

QuoteKind parse_quote_kind(std::string_view s) {
  if (s == "direct") return QuoteKind::direct;
  if (s == "indirect") return QuoteKind::indirect;
  throw MalformedInput("unknown quotation kind '" + std::string(s) + "'");
}

nlohmann::json to_json(const Quotation& q) {
  return {{"entity_id", q.entity_id}, {"doc_id", q.doc_id},           {"sentence_index", q.sentence_index},
          {"kind", to_string(q.kind)}, {"text", q.text}, {"published_at", format_timestamp(q.published_at)}};
}

Quotation quotation_from_json(const nlohmann::json& j) {
  Quotation q;
  q.entity_id = j.at("entity_id").get<std::string>();
  q.doc_id = j.at("doc_id").get<std::string>();
  q.sentence_index = j.at("sentence_index").get<std::size_t>();
  q.kind = parse_quote_kind(j.at("kind").get<std::string>());
  q.text = j.at("text").get<std::string>();
  q.published_at = parse_timestamp(j.at("published_at").get<std::string>());
  return q;
}

QuotePatterns QuotePatterns::parse(std::string_view contents) {
  QuotePatterns p;
  auto sections = text::parse_sections(contents);
  for (const auto& v : sections["verbs"]) p.verbs.insert(text::lowercase(v));
  for (const auto& c : sections["connectives"]) p.connectives.insert(text::lowercase(c));
  for (const auto& line : sections["delimiters"]) {
    const auto parts = tokenize(line);
    if (parts.size() != 2) throw ConfigError("delimiter line needs an opening and a closing mark: '" + line + "'");
    p.delimiters.emplace_back(parts[0].text, parts[1].text);
  }
  return p;
}

QuotePatterns QuotePatterns::from_file(const std::filesystem::path& path) { return parse(text::read_file(path)); }

QuotePatterns QuotePatterns::defaults() { return parse(resources::quote_patterns()); }

namespace {

struct QuoteSpan {
  std::size_t open;  // token index of the opening mark
  std::size_t close; // token index of the closing mark
};

// A mark glued to word characters on both sides is an apostrophe.
bool is_apostrophe(const Passage& unit, std::size_t i) {
  const auto& t = unit.tokens;
  return i > 0 && i + 1 < t.size() && t[i - 1].end == t[i].begin && t[i].end == t[i + 1].begin &&
         text::is_word(t[i - 1].text) && text::is_word(t[i + 1].text);
}

// Pairs delimiters left to right. Returns nullopt when the marks of this
// delimiter type are unbalanced in the sentence.
std::optional<std::vector<QuoteSpan>> delimited_spans(const Passage& unit, const std::string& open,
                                                      const std::string& close) {
  std::vector<QuoteSpan> spans;
  constexpr auto none = static_cast<std::size_t>(-1);
  std::size_t pending = none;
  for (std::size_t i = 0; i < unit.tokens.size(); ++i) {
    const auto& t = unit.tokens[i].text;
    if (t != open && t != close) continue;
    if (is_apostrophe(unit, i)) continue;
    if (open == close) {
      if (pending != none) {
        spans.push_back({pending, i});
        pending = none;
      } else {
        pending = i;
      }
    } else if (t == open) {
      if (pending != none) return std::nullopt; // nested marks of one type
      pending = i;
    } else {
      if (pending == none) return std::nullopt;
      spans.push_back({pending, i});
      pending = none;
    }
  }
  if (pending != none) return std::nullopt;
  return spans;
}

// Token index right after the mention, skipping a `, descriptor ,` appositive.
std::size_t after_mention(const Mention& m, const Passage& unit) {
  std::size_t after = m.end;
  if (!m.job_descriptor.empty() && after < unit.tokens.size() && unit.tokens[after].text == ",") {
    for (std::size_t i = after + 1; i < unit.tokens.size(); ++i) {
      if (unit.tokens[i].text == ",") return i + 1;
    }
  }
  return after;
}

bool is_verb(const Passage& unit, std::size_t i, const QuotePatterns& p) {
  return i < unit.tokens.size() && p.verbs.count(text::lowercase(unit.tokens[i].text)) != 0;
}

std::string trimmed(std::string_view s) { return text::collapse_spaces(s); }

} // namespace

std::vector<Quotation> extract_quotations(const NewsArticle& article, const std::vector<Passage>& units,
                                          const std::vector<Mention>& mentions, const QuotePatterns& patterns) {
  std::map<std::size_t, std::vector<const Mention*>> by_sentence;
  for (const auto& m : mentions)
    if (m.resolved()) by_sentence[m.sentence_index].push_back(&m);

  struct Found {
    std::size_t sentence;
    std::size_t position;
    Quotation quotation;
  };
  std::vector<Found> found;

  for (auto& [s, ms] : by_sentence) {
    const auto& unit = units.at(s);
    std::sort(ms.begin(), ms.end(), [](const Mention* a, const Mention* b) { return a->start < b->start; });

    // Mentions next to an attribution verb, with the verb position.
    std::vector<std::pair<const Mention*, std::size_t>> speakers;
    for (const Mention* m : ms) {
      const auto after = after_mention(*m, unit);
      if (is_verb(unit, after, patterns)) speakers.emplace_back(m, after);
      else if (m->start > 0 && is_verb(unit, m->start - 1, patterns)) speakers.emplace_back(m, m->start - 1);
    }
    if (speakers.empty()) continue;

    std::vector<QuoteSpan> direct_spans;
    for (const auto& [open, close] : patterns.delimiters) {
      auto spans = delimited_spans(unit, open, close);
      if (!spans) continue;
      for (const auto& span : *spans) {
        if (span.close == span.open + 1) continue;
        const auto begin = unit.tokens[span.open].end;
        const auto end = unit.tokens[span.close].begin;
        auto content = trimmed(std::string_view(unit.text).substr(begin, end - begin));
        if (content.empty()) continue;

        const Mention* best = nullptr;
        std::size_t best_distance = 0;
        bool best_before = false;
        for (const auto& [m, verb] : speakers) {
          std::size_t distance;
          bool before;
          if (m->end <= span.open) {
            distance = span.open - m->end;
            before = true;
          } else if (m->start > span.close) {
            distance = m->start - span.close;
            before = false;
          } else {
            continue; // inside the quote
          }
          if (!best || distance < best_distance || (distance == best_distance && before && !best_before)) {
            best = m;
            best_distance = distance;
            best_before = before;
          }
        }
        if (!best) continue;
        direct_spans.push_back(span);
        found.push_back({s, span.open,
                         {best->entity_id, article.doc_id, s, QuoteKind::direct, std::move(content),
                          article.published_at}});
      }
    }

    for (const auto& [m, verb] : speakers) {
      if (verb < m->end) continue; // `said X` has no indirect form
      const auto connective = verb + 1;
      if (connective + 1 >= unit.tokens.size()) continue;
      if (patterns.connectives.count(text::lowercase(unit.tokens[connective].text)) == 0) continue;
      const auto first = connective + 1;
      const bool quoted = std::any_of(direct_spans.begin(), direct_spans.end(),
                                      [&](const QuoteSpan& q) { return q.open == first; });
      if (quoted) continue;
      auto clause = trimmed(std::string_view(unit.text).substr(unit.tokens[first].begin));
      if (clause.empty()) continue;
      found.push_back(
          {s, first, {m->entity_id, article.doc_id, s, QuoteKind::indirect, std::move(clause), article.published_at}});
    }
  }

  std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    return std::tie(a.sentence, a.position) < std::tie(b.sentence, b.position);
  });
  std::vector<Quotation> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(std::move(f.quotation));
  return out;
}

} // namespace chronolens
