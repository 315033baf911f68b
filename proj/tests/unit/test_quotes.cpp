#include <doctest.h>

#include "chronolens/archive.hpp"
#include "chronolens/quotes.hpp"
#include "fixtures.hpp"

using namespace chronolens;
using chronolens::testing::raw_doc;

namespace {

ArchiveState ingest(const std::vector<RawDocument>& docs, const std::string& gazetteer) {
  PipelineConfig config;
  config.gazetteer = Gazetteer::parse(gazetteer);
  return ingest_batch(ArchiveState(config), testing::to_jsonl(docs), config).first;
}

std::vector<Quotation> all_quotes(const ArchiveState& s) {
  std::vector<Quotation> out;
  for (const auto& [id, list] : s.quotations) out.insert(out.end(), list.begin(), list.end());
  return out;
}

} // namespace

TEST_SUITE("quotes") {

TEST_CASE("direct quotation after 'X said:'") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Speech", "Obama said: \"We will act.\"")}, "Barack Obama\nObama\tBarack Obama\n");
  const auto q = all_quotes(s);
  REQUIRE(q.size() == 1);
  CHECK(q[0].entity_id == "barack-obama");
  CHECK(q[0].kind == QuoteKind::direct);
  CHECK(q[0].text == "We will act.");
  CHECK(q[0].sentence_index == 1);
}

TEST_CASE("indirect quotation bounded by the sentence end") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Plan", "Merkel stated that the plan works. Markets rose.")},
                        "Angela Merkel\nMerkel\tAngela Merkel\n");
  const auto q = all_quotes(s);
  REQUIRE(q.size() == 1);
  CHECK(q[0].entity_id == "angela-merkel");
  CHECK(q[0].kind == QuoteKind::indirect);
  CHECK(q[0].text == "the plan works.");
}

TEST_CASE("no resolved mention, no quotation") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Anon", "Someone said: \"Nothing to see.\"")}, "Barack Obama\n");
  CHECK(all_quotes(s).empty());
}

TEST_CASE("portuguese patterns and guillemets") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Orçamento",
                                 "«O orçamento é justo», disse João Gonçalves. Gonçalves afirmou que vai aprovar tudo.")},
                        "João Gonçalves\nGonçalves\tJoão Gonçalves\n");
  const auto q = all_quotes(s);
  REQUIRE(q.size() == 2);
  CHECK(q[0].kind == QuoteKind::direct);
  CHECK(q[0].text == "O orçamento é justo");
  CHECK(q[1].kind == QuoteKind::indirect);
  CHECK(q[1].text == "vai aprovar tudo.");
}

TEST_CASE("descriptor between speaker and verb") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Tax", "Helen Carter, minister of finance, said that taxes will fall.")},
                        "Helen Carter\n");
  const auto q = all_quotes(s);
  REQUIRE(q.size() == 1);
  CHECK(q[0].text == "taxes will fall.");
}

TEST_CASE("the quote goes to the nearest attributed mention") {
  const auto s = ingest({raw_doc("d", "2015-01-01", "Talks",
                                 "Ana Costa said little, but Rui Dias said: \"Enough.\" Ana Costa met Rui Dias, who said: \"Fine.\"")},
                        "Rui Dias\nAna Costa\n");
  const auto q = all_quotes(s);
  // The second sentence has no mention next to its verb.
  REQUIRE(q.size() == 1);
  CHECK(q[0].entity_id == "rui-dias");
  CHECK(q[0].text == "Enough.");
}

TEST_CASE("quotation invariants on the fixture corpus") {
  const auto config = testing::fixture_config();
  const auto s = ingest_batch(ArchiveState(config), testing::read_fixture("corpus50.jsonl"), config).first;
  const auto quotes = all_quotes(s);
  CHECK(quotes.size() > 50);
  for (const auto& q : quotes) {
    CHECK_FALSE(q.text.empty());
    // The sentence holding the quotation produced a snippet for the same entity.
    const auto& snippets = s.snippets.at(q.entity_id);
    const auto it = std::find_if(snippets.begin(), snippets.end(), [&](const Snippet& sn) {
      return sn.doc_id == q.doc_id && sn.sentence_index == q.sentence_index;
    });
    REQUIRE(it != snippets.end());
    CHECK(it->text.find(q.text) != std::string::npos);
    if (q.kind == QuoteKind::direct) {
      const auto count = [&](const std::string& mark) {
        std::size_t n = 0;
        for (auto p = it->text.find(mark); p != std::string::npos; p = it->text.find(mark, p + 1)) ++n;
        return n;
      };
      CHECK(count("«") == count("»"));
      CHECK(count("\"") % 2 == 0);
    }
  }
}

TEST_CASE("pattern file and wire format") {
  const auto p = QuotePatterns::parse("[verbs]\nsaid\n[delimiters]\n« »\n[connectives]\nthat\n");
  CHECK(p.verbs.count("said") == 1);
  REQUIRE(p.delimiters.size() == 1);
  CHECK(p.delimiters[0] == std::pair<std::string, std::string>{"«", "»"});
  const Quotation q{"e", "d", 2, QuoteKind::indirect, "x.", 86400};
  CHECK(quotation_from_json(to_json(q)) == q);
  CHECK(to_json(q).at("kind") == "indirect");
  CHECK(parse_quote_kind("direct") == QuoteKind::direct);
}

}
