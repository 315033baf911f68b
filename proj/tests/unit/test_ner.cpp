#include <doctest.h>

#include <random>
#include <sstream>

#include "chronolens/archive.hpp"
#include "chronolens/ner.hpp"
#include "fixtures.hpp"

using namespace chronolens;
using chronolens::testing::raw_doc;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Leftmost-longest matching by enumerating every (start, length) pair.
std::vector<Tag> brute_force_annotate(const std::vector<std::string>& tokens,
                                      const std::vector<std::vector<std::string>>& names) {
  std::vector<Tag> tags(tokens.size(), Tag::O);
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best = 0;
    for (const auto& n : names)
      if (n.size() > best && i + n.size() <= tokens.size() &&
          std::equal(n.begin(), n.end(), tokens.begin() + static_cast<long>(i)))
        best = n.size();
    if (best == 0) {
      ++i;
      continue;
    }
    tags[i] = Tag::B;
    for (std::size_t k = 1; k < best; ++k) tags[i + k] = Tag::I;
    i += best;
  }
  return tags;
}

struct Analysed {
  std::vector<Passage> units;
  std::vector<Mention> mentions;
};

Analysed analyse(const std::string& title, const std::string& body, const Gazetteer& gaz, EntityRegistry& registry) {
  PipelineConfig config;
  config.gazetteer = gaz;
  const auto article = clean_article(raw_doc("d1", "2015-01-01T10:00:00Z", title, body), config.segmenter);
  Analysed a;
  a.units = analysis_units(article, config.segmenter);
  a.mentions = extract_mentions("d1", a.units, tag_units(a.units, config));
  disambiguate(a.mentions, a.units, registry, config.ner, article.published_at, &gaz);
  return a;
}

} // namespace

TEST_SUITE("ner") {

TEST_CASE("gazetteer file format") {
  const auto gaz = Gazetteer::parse("# people\nCristiano  Ronaldo\nRonaldo\tCristiano Ronaldo\n\nAna Silva\n");
  CHECK(gaz.entries() == std::set<std::string>{"Ana Silva", "Cristiano Ronaldo"});
  CHECK(gaz.canonical_for("Ronaldo") == "Cristiano Ronaldo");
  CHECK(gaz.canonical_for("Cristiano Ronaldo") == "Cristiano Ronaldo");
  CHECK_FALSE(gaz.canonical_for("Messi").has_value());
  CHECK(gaz.aliases_of("Cristiano Ronaldo") == std::vector<std::string>{"Ronaldo"});
  CHECK(gaz.token_set().count("ronaldo") == 1);
}

TEST_CASE("dictionary annotation examples") {
  Gazetteer gaz;
  gaz.add("Cristiano Ronaldo");
  gaz.add("Ana Silva");
  gaz.add("Ana Silva Costa");
  CHECK(dictionary_annotate(words("Cristiano Ronaldo scored"), gaz).tags == std::vector<Tag>{Tag::B, Tag::I, Tag::O});
  CHECK(dictionary_annotate(words("nobody here today"), gaz).tags == std::vector<Tag>{Tag::O, Tag::O, Tag::O});
  CHECK(dictionary_annotate(words("Ana Silva Costa spoke"), gaz).tags ==
        std::vector<Tag>{Tag::B, Tag::I, Tag::I, Tag::O});
}

TEST_CASE("dictionary annotation equals a brute-force leftmost-longest matcher") {
  std::mt19937 rng(11);
  const std::vector<std::string> vocab = {"Ana", "Silva", "Costa", "Rui", "Lopes", "said", "the", "Dias"};
  for (int round = 0; round < 300; ++round) {
    Gazetteer gaz;
    std::vector<std::vector<std::string>> names;
    for (int n = 0; n < 1 + static_cast<int>(rng() % 5); ++n) {
      std::vector<std::string> name;
      for (int k = 0; k < 1 + static_cast<int>(rng() % 3); ++k) name.push_back(vocab[rng() % vocab.size()]);
      std::string joined;
      for (const auto& w : name) joined += (joined.empty() ? "" : " ") + w;
      gaz.add(joined);
      names.push_back(name);
    }
    std::vector<std::string> tokens;
    for (int k = 0; k < static_cast<int>(rng() % 12); ++k) tokens.push_back(vocab[rng() % vocab.size()]);
    const auto got = dictionary_annotate(tokens, gaz);
    CHECK(got.tags == brute_force_annotate(tokens, names));
    CHECK(is_valid_bio(got.tags));
  }
}

TEST_CASE("BIO helpers") {
  CHECK(is_valid_bio(std::vector<Tag>{Tag::B, Tag::I, Tag::O, Tag::B}));
  CHECK_FALSE(is_valid_bio(std::vector<Tag>{Tag::I}));
  CHECK_FALSE(is_valid_bio(std::vector<Tag>{Tag::O, Tag::I}));
  std::vector<Tag> t{Tag::I, Tag::O, Tag::I, Tag::I};
  repair_bio(t);
  CHECK(t == std::vector<Tag>{Tag::B, Tag::O, Tag::B, Tag::I});
  CHECK(per_spans(t) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 4}});
  CHECK(merge_annotations(std::vector<Tag>{Tag::B, Tag::I, Tag::O, Tag::B}, std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::O}) ==
        std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::B});
}

TEST_CASE("job descriptor heuristic") {
  Gazetteer gaz;
  gaz.add("Barack Obama");
  EntityRegistry registry;
  const auto a = analyse("Visit", "Barack Obama, president of USA, said the talks went well.", gaz, registry);
  REQUIRE(a.mentions.size() == 1);
  CHECK(a.mentions[0].entity_id == "barack-obama");
  CHECK(a.mentions[0].job_descriptor == "president of USA");
  CHECK(registry.find("barack-obama")->professions.at("president of USA") == 1);
  CHECK(registry.find("barack-obama")->top_profession() == "president of USA");
}

TEST_CASE("leading determiners are dropped from descriptors") {
  Gazetteer gaz;
  gaz.add("Cristiano Ronaldo");
  EntityRegistry registry;
  const auto a = analyse("Award", "Cristiano Ronaldo, the footballer, won again.", gaz, registry);
  REQUIRE(a.mentions.size() == 1);
  CHECK(a.mentions[0].job_descriptor == "footballer");
}

TEST_CASE("within-document coreference") {
  Gazetteer gaz;
  gaz.add("Barack Obama");
  gaz.add("Michelle Obama");
  gaz.add_alias("Obama", "Barack Obama");
  EntityRegistry registry;
  const auto a = analyse("Trip", "Michelle Obama arrived first. Obama followed later.", gaz, registry);
  REQUIRE(a.mentions.size() == 2);
  // The most recent preceding mention containing "Obama" wins over the alias.
  CHECK(a.mentions[0].entity_id == "michelle-obama");
  CHECK(a.mentions[1].entity_id == "michelle-obama");
}

TEST_CASE("short mentions without a candidate stay unresolved") {
  const auto seg = Segmenter::with_defaults();
  const auto article = clean_article(raw_doc("d1", "2015-01-01", "News", "Silva spoke to reporters."), seg);
  const auto units = analysis_units(article, seg);
  std::vector<Mention> mentions = {{"d1", 1, 0, 1, "Silva", "", ""}};
  EntityRegistry registry;
  const auto stats = disambiguate(mentions, units, registry, NerPatterns::defaults(), article.published_at);
  CHECK_FALSE(mentions[0].resolved());
  CHECK(stats.unresolved == 1);
  CHECK(registry.size() == 0);

  // A two-token surface with no candidate creates a new profile instead.
  const auto two = clean_article(raw_doc("d2", "2015-01-01", "News", "Ana Silva spoke to reporters."), seg);
  const auto two_units = analysis_units(two, seg);
  std::vector<Mention> named = {{"d2", 1, 0, 2, "Ana Silva", "", ""}};
  CHECK(disambiguate(named, two_units, registry, NerPatterns::defaults(), two.published_at).entities_created == 1);
  CHECK(named[0].entity_id == "ana-silva");
}

TEST_CASE("cross-document resolution through the registry") {
  EntityRegistry registry;
  registry.create("Barack Obama", {"Obama"});
  Gazetteer tagging_only;
  tagging_only.add("Obama");
  const auto a = analyse("Two", "Obama spoke again.", tagging_only, registry);
  REQUIRE(a.mentions.size() == 1);
  CHECK(a.mentions[0].entity_id == "barack-obama");
  CHECK(registry.size() == 1);
}

TEST_CASE("entity ids are slugs with numeric suffixes on collision") {
  EntityRegistry registry;
  CHECK(registry.create("João Gonçalves").entity_id == "joao-goncalves");
  CHECK(registry.create("Joao Goncalves").entity_id == "joao-goncalves-2");
  CHECK(registry.lookup("João Gonçalves") == "joao-goncalves");
  CHECK(EntityRegistry::from_json(registry.to_json()) == registry);
}

TEST_CASE("disambiguation is idempotent for a fixed registry") {
  Gazetteer gaz;
  gaz.add("Helen Carter");
  gaz.add("David Morgan");
  gaz.add_alias("Carter", "Helen Carter");
  EntityRegistry base;
  EntityRegistry r1 = base, r2 = base;
  const auto a = analyse("Carter and Morgan", "Helen Carter, minister of finance, met David Morgan. Carter left.", gaz, r1);
  const auto b = analyse("Carter and Morgan", "Helen Carter, minister of finance, met David Morgan. Carter left.", gaz, r2);
  CHECK(a.mentions == b.mentions);
  CHECK(r1 == r2);
  // Running again on the updated registry resolves to the same entities.
  const auto c = analyse("Carter and Morgan", "Helen Carter, minister of finance, met David Morgan. Carter left.", gaz, r1);
  REQUIRE(c.mentions.size() == a.mentions.size());
  for (std::size_t i = 0; i < a.mentions.size(); ++i) CHECK(c.mentions[i].entity_id == a.mentions[i].entity_id);
}

TEST_CASE("with full gazetteer coverage, mentions equal the dictionary annotation") {
  const auto gaz = Gazetteer::from_file(testing::fixture_path("gazetteer.tsv"));
  PipelineConfig config;
  config.gazetteer = gaz;
  std::vector<testing::GoldArticle> gold = testing::load_gold();
  std::vector<std::pair<std::size_t, RawDocument>> docs;
  std::vector<std::string> lines;
  {
    std::istringstream in(testing::read_fixture("corpus50.jsonl"));
    for (std::string line; std::getline(in, line);) lines.push_back(line);
  }
  for (const auto& line : lines) {
    const auto article = clean_article(raw_document_from_json(nlohmann::json::parse(line)), config.segmenter);
    const auto units = analysis_units(article, config.segmenter);
    const auto tags = tag_units(units, config);
    const auto dict = dictionary_annotate(units, gaz);
    REQUIRE(tags.size() == dict.size());
    for (std::size_t i = 0; i < tags.size(); ++i) CHECK(tags[i] == dict[i].tags);
  }
}

}
