#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronolens/text.hpp"
#include "chronolens/time.hpp"

namespace chronolens {

/// One corpus line as it arrives on the wire. `published_at` stays textual
/// until cleaning so that timestamp errors surface per article.
struct RawDocument {
  std::string doc_id;
  std::string source;
  std::string category;
  std::string published_at;
  std::string title;
  std::string body;
};

/// Throws MalformedInput when a required key is missing or not a string.
RawDocument raw_document_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RawDocument& doc);

/// Half-open byte range [begin, end).
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  TextSpan span;
  std::vector<Token> tokens;
};

struct NewsArticle {
  std::string doc_id;
  std::string source;
  std::string category;
  Timestamp published_at = 0;
  std::string title;
  std::string clean_text;
  std::vector<TextSpan> sentences;
};

/// Tokens are maximal runs of letters/digits or single punctuation marks;
/// offsets are byte positions into `text`.
std::vector<Token> tokenize(std::string_view text);

/// Rule-based sentence splitter and tokenizer.
///
/// Tokens are maximal runs of letters/digits or single punctuation marks.
/// A sentence ends at `.`, `!`, `?` or `…` (plus any closing quotes or
/// brackets glued to it) when whitespace and an uppercase-initial token
/// follow, unless the period closes a listed abbreviation or sits inside an
/// open quotation. Blank lines always end a sentence.
class Segmenter {
public:
  Segmenter() = default;
  explicit Segmenter(std::vector<std::string> abbreviations);

  /// Abbreviations are stored with their trailing period, e.g. "Dr.".
  static Segmenter from_file(const std::filesystem::path& path);
  /// Segmenter over the built-in abbreviation list.
  static Segmenter with_defaults();

  std::vector<Token> tokenize(std::string_view text) const { return chronolens::tokenize(text); }
  std::vector<Sentence> segment(std::string_view text) const;

  const text::WordSet& abbreviations() const noexcept { return abbreviations_; }

private:
  text::WordSet abbreviations_;
};

struct CleanerConfig {
  /// Blocks whose anchor-text share exceeds this are navigation.
  double max_link_density = 0.33;
  /// Non-paragraph blocks shorter than this many words are dropped.
  std::size_t min_block_words = 4;
};

/// True when the body contains something that looks like an HTML/XML tag.
bool has_markup(std::string_view body) noexcept;

/// Main-content extraction. Markup bodies go through block-level link
/// density scoring; plain bodies are whitespace-normalized. Paragraphs in
/// the result are separated by a blank line.
std::string extract_main_text(std::string_view body, const CleanerConfig& config = {});

/// Throws MalformedTimestamp when `published_at` is unparseable.
NewsArticle clean_article(const RawDocument& raw, const Segmenter& segmenter, const CleanerConfig& config = {});

/// A tokenized unit of analysis. Index 0 is always the title; body sentence
/// k is unit k + 1. Token offsets are relative to `text`.
struct Passage {
  std::string text;
  std::vector<Token> tokens;
};

std::vector<Passage> analysis_units(const NewsArticle& article, const Segmenter& segmenter);

} // namespace chronolens
