#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chronolens/ingest.hpp"
#include "chronolens/ner.hpp"
#include "chronolens/text.hpp"

namespace chronolens {

enum class QuoteKind { direct, indirect };

std::string_view to_string(QuoteKind kind) noexcept;
QuoteKind parse_quote_kind(std::string_view s);

struct Quotation {
  std::string entity_id;
  std::string doc_id;
  std::size_t sentence_index = 0;
  QuoteKind kind = QuoteKind::direct;
  /// Quoted content; delimiters stripped for direct quotations.
  std::string text;
  Timestamp published_at = 0;

  friend bool operator==(const Quotation&, const Quotation&) = default;
};

nlohmann::json to_json(const Quotation& q);
Quotation quotation_from_json(const nlohmann::json& j);

/// Pattern file sections: `[verbs]`, `[delimiters]` (open and close mark
/// separated by whitespace) and `[connectives]`.
struct QuotePatterns {
  text::WordSet verbs;
  std::vector<std::pair<std::string, std::string>> delimiters;
  text::WordSet connectives;

  static QuotePatterns parse(std::string_view contents);
  static QuotePatterns from_file(const std::filesystem::path& path);
  static QuotePatterns defaults();
};

/// Sentence-local pattern matching over resolved mentions.
///
/// Direct: a delimited span in a sentence where a resolved mention sits
/// next to an attribution verb (`X said`, `X, <descriptor>, said`, `said X`);
/// the quote goes to the nearest such mention outside the quote, preferring
/// the one before it on ties. Indirect: `X <verb> <connective> <clause>`
/// captures the clause up to the end of the sentence.
std::vector<Quotation> extract_quotations(const NewsArticle& article, const std::vector<Passage>& units,
                                          const std::vector<Mention>& mentions, const QuotePatterns& patterns);

} // namespace chronolens
