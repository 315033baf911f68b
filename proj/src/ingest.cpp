#include "chronolens/ingest.hpp"

#include <algorithm>
#include <array>

#include "chronolens/errors.hpp"
#include "chronolens/resources.hpp"

namespace chronolens {

RawDocument raw_document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw MalformedInput("corpus line is not a JSON object");
  auto field = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw MalformedInput(std::string("missing field '") + key + "'");
      return {};
    }
    if (!it->is_string()) throw MalformedInput(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  RawDocument doc;
  doc.doc_id = field("doc_id", true);
  if (doc.doc_id.empty()) throw MalformedInput("empty doc_id");
  doc.source = field("source", false);
  doc.category = field("category", false);
  doc.published_at = field("published_at", true);
  doc.title = field("title", false);
  doc.body = field("body", true);
  return doc;
}

nlohmann::json to_json(const RawDocument& doc) {
  return {{"doc_id", doc.doc_id}, {"source", doc.source},         {"category", doc.category},
          {"published_at", doc.published_at}, {"title", doc.title}, {"body", doc.body}};
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

bool is_terminal(std::string_view t) { return t == "." || t == "!" || t == "?" || t == "…"; }

bool is_closer(std::string_view t) {
  return t == "\"" || t == "'" || t == "»" || t == "”" || t == "’" || t == ")" || t == "]";
}

bool is_opener(std::string_view t) {
  return t == "\"" || t == "'" || t == "«" || t == "“" || t == "‘" || t == "(" || t == "[";
}

bool has_blank_line(std::string_view gap) {
  bool newline = false;
  for (char c : gap) {
    if (c == '\n') {
      if (newline) return true;
      newline = true;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      newline = false;
    }
  }
  return false;
}

// Double-quote nesting inside one paragraph. ASCII '"' toggles; typographic
// quotes nest. Single quotes are left alone since they double as apostrophes.
struct QuoteState {
  bool ascii_open = false;
  int depth = 0;

  void feed(std::string_view t) {
    if (t == "\"") ascii_open = !ascii_open;
    else if (t == "«" || t == "“") ++depth;
    else if ((t == "»" || t == "”") && depth > 0) --depth;
  }
  bool open() const { return ascii_open || depth > 0; }
};

} // namespace

Segmenter::Segmenter(std::vector<std::string> abbreviations)
    : abbreviations_(std::make_move_iterator(abbreviations.begin()), std::make_move_iterator(abbreviations.end())) {}

Segmenter Segmenter::from_file(const std::filesystem::path& path) { return Segmenter(text::read_list_file(path)); }

Segmenter Segmenter::with_defaults() { return Segmenter(text::parse_list(resources::abbreviations())); }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const char32_t cp = text::decode(s, pos);
    if (text::is_space(cp)) continue;
    if (text::is_alnum(cp)) {
      std::size_t end = pos;
      while (end < s.size()) {
        std::size_t next = end;
        if (!text::is_alnum(text::decode(s, next))) break;
        end = next;
      }
      pos = end;
    }
    tokens.push_back({start, pos, std::string(s.substr(start, pos - start))});
  }
  return tokens;
}

std::vector<Sentence> Segmenter::segment(std::string_view s) const {
  std::vector<Sentence> sentences;
  const auto tokens = tokenize(s);
  if (tokens.empty()) return sentences;

  std::size_t first = 0;
  auto close = [&](std::size_t last) {
    Sentence sentence;
    sentence.span = {tokens[first].begin, tokens[last].end};
    sentence.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(first),
                           tokens.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    for (auto& t : sentence.tokens) {
      t.begin -= sentence.span.begin;
      t.end -= sentence.span.begin;
    }
    sentences.push_back(std::move(sentence));
    first = last + 1;
  };
  auto gap = [&](std::size_t i) { return s.substr(tokens[i].end, tokens[i + 1].begin - tokens[i].end); };

  QuoteState quotes;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    quotes.feed(tokens[i].text);
    if (i + 1 == tokens.size()) break;
    if (has_blank_line(gap(i))) {
      close(i);
      quotes = {};
      continue;
    }
    if (!is_terminal(tokens[i].text)) continue;
    if (tokens[i].text == "." && i > first && gap(i - 1).empty() &&
        abbreviations_.count(tokens[i - 1].text + ".") != 0)
      continue;

    std::size_t last = i;
    QuoteState after = quotes;
    while (last + 1 < tokens.size() && gap(last).empty() && is_closer(tokens[last + 1].text)) {
      ++last;
      after.feed(tokens[last].text);
    }
    if (last + 1 == tokens.size()) {
      i = last;
      break;
    }
    if (after.open() || gap(last).empty()) continue;
    std::size_t next = last + 1;
    while (next + 1 < tokens.size() && is_opener(tokens[next].text)) ++next;
    if (!text::starts_upper(tokens[next].text)) continue;

    quotes = after;
    i = last;
    close(last);
  }
  if (first < tokens.size()) close(tokens.size() - 1);
  return sentences;
}

// ---------------------------------------------------------------------------
// Boilerplate removal

bool has_markup(std::string_view body) noexcept {
  for (std::size_t i = body.find('<'); i != std::string_view::npos; i = body.find('<', i + 1)) {
    if (i + 1 >= body.size()) return false;
    const char c = body[i + 1];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '/' || c == '!' || c == '?') return true;
  }
  return false;
}

namespace {

std::string normalize_plain(std::string_view body) {
  std::vector<std::string> paragraphs;
  std::string current;
  std::size_t start = 0;
  auto flush = [&] {
    auto p = text::collapse_spaces(current);
    if (!p.empty()) paragraphs.push_back(std::move(p));
    current.clear();
  };
  while (start <= body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    const auto line = body.substr(start, end - start);
    if (text::collapse_spaces(line).empty()) flush();
    else current.append(line).append("\n");
    start = end + 1;
  }
  flush();
  std::string out;
  for (const auto& p : paragraphs) {
    if (!out.empty()) out += "\n\n";
    out += p;
  }
  return out;
}

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 40> kEntities{{
    {"amp", '&'},     {"lt", '<'},       {"gt", '>'},       {"quot", '"'},      {"apos", '\''},
    {"nbsp", 0xA0},   {"laquo", 0xAB},   {"raquo", 0xBB},   {"ldquo", 0x201C},  {"rdquo", 0x201D},
    {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ndash", 0x2013}, {"mdash", 0x2014},  {"hellip", 0x2026},
    {"copy", 0xA9},   {"reg", 0xAE},     {"aacute", 0xE1},  {"agrave", 0xE0},   {"acirc", 0xE2},
    {"atilde", 0xE3}, {"auml", 0xE4},    {"ccedil", 0xE7},  {"eacute", 0xE9},   {"egrave", 0xE8},
    {"ecirc", 0xEA},  {"iacute", 0xED},  {"oacute", 0xF3},  {"ocirc", 0xF4},    {"otilde", 0xF5},
    {"ouml", 0xF6},   {"uacute", 0xFA},  {"uuml", 0xFC},    {"ntilde", 0xF1},   {"Aacute", 0xC1},
    {"Eacute", 0xC9}, {"Oacute", 0xD3},  {"Ccedil", 0xC7},  {"Atilde", 0xC3},   {"Uacute", 0xDA},
}};

// Decodes one entity starting at body[i] == '&'. Returns false when the
// text is not a recognized entity.
bool decode_entity(std::string_view body, std::size_t& i, std::string& out) {
  const auto semi = body.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10) return false;
  const auto name = body.substr(i + 1, semi - i - 1);
  char32_t cp = 0;
  if (name.size() > 1 && name[0] == '#') {
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const auto digits = name.substr(hex ? 2 : 1);
    if (digits.empty()) return false;
    for (char c : digits) {
      int v = -1;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      if (v < 0) return false;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      if (cp > 0x10FFFF) return false;
    }
  } else {
    auto it = std::find_if(kEntities.begin(), kEntities.end(), [&](const NamedEntity& e) { return e.name == name; });
    if (it == kEntities.end()) return false;
    cp = it->cp;
  }
  if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = text::kReplacement;
  text::append_utf8(out, cp);
  i = semi + 1;
  return true;
}

bool one_of(std::string_view name, std::initializer_list<std::string_view> names) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_raw_text(std::string_view tag) { return one_of(tag, {"script", "style", "textarea"}); }

bool is_boilerplate_container(std::string_view tag) {
  return one_of(tag, {"head", "title", "nav", "header", "footer", "aside", "form", "noscript", "select", "iframe",
                      "svg", "template", "button", "menu"});
}

bool is_block(std::string_view tag) {
  return one_of(tag, {"p", "div", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6", "article", "section",
                      "main", "blockquote", "pre", "table", "tr", "td", "th", "dl", "dt", "dd", "figure",
                      "figcaption", "hr", "body", "html", "center", "address", "caption", "tbody", "thead"});
}

bool is_paragraph(std::string_view tag) { return tag == "p" || tag == "blockquote"; }

struct Block {
  std::string text;
  std::size_t chars = 0;
  std::size_t link_chars = 0;
  bool paragraph = false;
};

class HtmlExtractor {
public:
  explicit HtmlExtractor(const CleanerConfig& config) : config_(config) {}

  std::string run(std::string_view body) {
    std::size_t i = 0;
    while (i < body.size()) {
      const char c = body[i];
      if (c == '<' && i + 1 < body.size()) {
        const char n = body[i + 1];
        if (n == '!' && body.substr(i, 4) == "<!--") {
          const auto end = body.find("-->", i + 4);
          i = end == std::string_view::npos ? body.size() : end + 3;
          continue;
        }
        if (n == '!' || n == '?') {
          i = skip_tag(body, i);
          continue;
        }
        if (n == '/' || (n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z')) {
          i = handle_tag(body, i);
          continue;
        }
      }
      if (c == '&') {
        std::string decoded;
        if (decode_entity(body, i, decoded)) {
          add_text(decoded);
          continue;
        }
      }
      std::size_t next = i;
      text::decode(body, next);
      add_text(body.substr(i, next - i));
      i = next;
    }
    flush();
    std::string out;
    for (const auto& p : kept_) {
      if (!out.empty()) out += "\n\n";
      out += p;
    }
    return out;
  }

private:
  static std::size_t skip_tag(std::string_view body, std::size_t i) {
    char quote = 0;
    for (++i; i < body.size(); ++i) {
      const char c = body[i];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        return i + 1;
      }
    }
    return body.size();
  }

  std::size_t handle_tag(std::string_view body, std::size_t i) {
    const std::size_t end = skip_tag(body, i);
    std::size_t p = i + 1;
    const bool closing = body[p] == '/';
    if (closing) ++p;
    std::string name;
    while (p < end && (std::isalnum(static_cast<unsigned char>(body[p])) || body[p] == '-' || body[p] == ':'))
      name += static_cast<char>(std::tolower(static_cast<unsigned char>(body[p++])));
    const bool self_closing = end >= 2 && body[end - 2] == '/';

    if (!closing && is_raw_text(name)) {
      const std::string close = "</" + name;
      std::size_t j = end;
      while (j < body.size()) {
        j = body.find("</", j);
        if (j == std::string_view::npos) return body.size();
        std::string candidate(body.substr(j, close.size()));
        std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (candidate == close) return skip_tag(body, j);
        j += 2;
      }
      return body.size();
    }
    if (is_boilerplate_container(name) && !self_closing) {
      flush();
      if (closing) skip_depth_ = std::max(0, skip_depth_ - 1);
      else ++skip_depth_;
      return end;
    }
    if (name == "a" && !self_closing) {
      link_depth_ = closing ? std::max(0, link_depth_ - 1) : link_depth_ + 1;
      return end;
    }
    if (name == "br") {
      add_text(" ");
      return end;
    }
    if (is_block(name)) {
      flush();
      if (!closing && is_paragraph(name)) current_.paragraph = true;
      return end;
    }
    // Unknown inline tags separate nothing.
    return end;
  }

  void add_text(std::string_view s) {
    if (skip_depth_ > 0) return;
    for (std::size_t pos = 0; pos < s.size();) {
      const auto start = pos;
      const char32_t cp = text::decode(s, pos);
      if (!text::is_space(cp)) {
        ++current_.chars;
        if (link_depth_ > 0) ++current_.link_chars;
      }
      current_.text.append(s.substr(start, pos - start));
    }
  }

  void flush() {
    Block block = std::move(current_);
    current_ = {};
    auto collapsed = text::collapse_spaces(block.text);
    if (collapsed.empty()) return;
    const double density = static_cast<double>(block.link_chars) / static_cast<double>(block.chars);
    if (density > config_.max_link_density) return;
    const auto words = std::count(collapsed.begin(), collapsed.end(), ' ') + 1;
    if (!block.paragraph && static_cast<std::size_t>(words) < config_.min_block_words) return;
    kept_.push_back(neutralize_tags(std::move(collapsed)));
  }

  // Entity-decoded '<' must not form a tag in the output.
  static std::string neutralize_tags(std::string s) {
    for (std::size_t i = s.find('<'); i != std::string::npos; i = s.find('<', i + 1)) {
      if (i + 1 < s.size() && has_markup(s.substr(i, 2))) s.insert(i + 1, " ");
    }
    return s;
  }

  const CleanerConfig& config_;
  Block current_;
  std::vector<std::string> kept_;
  int skip_depth_ = 0;
  int link_depth_ = 0;
};

} // namespace

std::string extract_main_text(std::string_view body, const CleanerConfig& config) {
  if (!has_markup(body)) return normalize_plain(body);
  return HtmlExtractor(config).run(body);
}

NewsArticle clean_article(const RawDocument& raw, const Segmenter& segmenter, const CleanerConfig& config) {
  NewsArticle article;
  article.published_at = parse_published_at(raw.published_at);
  article.doc_id = raw.doc_id;
  article.source = raw.source;
  article.category = raw.category;
  article.title = has_markup(raw.title) ? text::collapse_spaces(HtmlExtractor(CleanerConfig{1.0, 0}).run(raw.title))
                                        : text::collapse_spaces(raw.title);
  article.clean_text = extract_main_text(raw.body, config);
  for (const auto& sentence : segmenter.segment(article.clean_text)) article.sentences.push_back(sentence.span);
  return article;
}

std::vector<Passage> analysis_units(const NewsArticle& article, const Segmenter& segmenter) {
  std::vector<Passage> units;
  units.reserve(article.sentences.size() + 1);
  units.push_back({article.title, segmenter.tokenize(article.title)});
  for (const auto& span : article.sentences) {
    Passage p;
    p.text = article.clean_text.substr(span.begin, span.size());
    p.tokens = segmenter.tokenize(p.text);
    units.push_back(std::move(p));
  }
  return units;
}

} // namespace chronolens
