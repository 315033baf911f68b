#include <doctest.h>

#include "chronolens/api.hpp"
#include "fixtures.hpp"

using namespace chronolens;
using nlohmann::json;

namespace {

struct Fixture {
  explicit Fixture(std::string_view corpus, std::string_view gazetteer)
      : archive(testing::fixture_config(gazetteer)), api(archive) {
    if (!corpus.empty()) archive.ingest(testing::read_fixture(corpus));
  }
  Response get(std::string_view path, const QueryParams& params = {}) const { return api.handle("GET", path, params); }
  json get_json(std::string_view path, const QueryParams& params = {}) const {
    const auto r = get(path, params);
    REQUIRE_MESSAGE(r.status == 200, r.body);
    return json::parse(r.body);
  }

  Archive archive;
  Api api;
};

Fixture corpus50() { return Fixture("corpus50.jsonl", "gazetteer.tsv"); }

void check_error(const Response& r, int status, std::string_view code) {
  CHECK(r.status == status);
  const auto body = json::parse(r.body);
  CHECK(body.at("code") == code);
  CHECK(body.at("message").is_string());
  CHECK_FALSE(body.at("message").get<std::string>().empty());
}

} // namespace

TEST_SUITE("api") {

TEST_CASE("ballon d'or nominees puts Ronaldo first") {
  const Fixture f("sports.jsonl", "sports_gazetteer.tsv");
  const auto body = f.get_json("/api/search", {{"q", "ballon d'or nominees"}});
  const auto& results = body.at("results");
  REQUIRE(results.size() >= 2);
  CHECK(results[0].at("entity_id") == "cristiano-ronaldo");
  CHECK(results[0].at("canonical_name") == "Cristiano Ronaldo");
  for (std::size_t i = 1; i < results.size(); ++i)
    CHECK(results[i - 1].at("score").get<double>() >= results[i].at("score").get<double>());

  const auto one = f.get_json("/api/search", {{"q", "ballon d'or nominees"}, {"limit", "1"}});
  CHECK(one.at("results").size() == 1);
  CHECK(one.at("results")[0] == results[0]);

  const auto none = f.get_json("/api/search", {{"q", "cricket"}});
  CHECK(none.at("results").empty());
}

TEST_CASE("errors map to status codes") {
  const auto f = corpus50();
  check_error(f.get("/api/search", {{"q", ""}}), 400, "EmptyQuery");
  check_error(f.get("/api/search", {{"q", "the and of"}}), 400, "EmptyQuery");
  check_error(f.get("/api/search", {{"q", "budget"}, {"from", "2015-03-01"}, {"to", "2015-02-01"}}), 422,
              "InvalidSpan");
  check_error(f.get("/api/search", {{"q", "budget"}, {"from", "March 1st"}}), 400, "MalformedTimestamp");
  check_error(f.get("/api/entity/nobody-at-all"), 404, "UnknownEntity");
  check_error(f.get("/api/entity/nobody-at-all/quotes"), 404, "UnknownEntity");
  check_error(f.get("/api/network", {{"entity", "nobody-at-all"}}), 404, "UnknownEntity");
  check_error(f.get("/api/nowhere"), 404, "NotFound");
  check_error(f.api.handle("POST", "/api/search", {{"q", "budget"}}), 405, "MethodNotAllowed");
  check_error(f.api.handle("GET", "/api/ingest", {}), 405, "MethodNotAllowed");
}

TEST_CASE("entity pages are self-consistent") {
  const auto f = corpus50();
  const auto snap = f.archive.snapshot();
  for (const auto& [id, profile] : snap->registry.profiles()) {
    const auto body = f.get_json("/api/entity/" + id);
    CHECK(body.at("entity_id") == id);
    CHECK(body.at("canonical_name") == profile.canonical_name);
    std::set<std::string> docs;
    std::size_t snippets = 0;
    for (const auto& a : body.at("articles")) {
      docs.insert(a.at("doc_id").get<std::string>());
      snippets += a.at("snippets").size();
    }
    for (const auto& q : body.at("quotations")) CHECK(docs.count(q.at("doc_id").get<std::string>()) == 1);
    std::uint64_t timeline = 0;
    for (const auto& b : body.at("timeline")) timeline += b.at("count").get<std::uint64_t>();
    CHECK(timeline == snippets);

    const auto neighbors = snap->graph.neighbors(id, std::nullopt);
    const auto& related = body.at("related");
    REQUIRE(related.size() == std::min<std::size_t>(neighbors.size(), 10));
    for (std::size_t i = 0; i < related.size(); ++i) {
      CHECK(related[i].at("entity_id") == neighbors[i].first);
      CHECK(related[i].at("weight") == neighbors[i].second);
    }

    const auto quotes = f.get_json("/api/entity/" + id + "/quotes");
    CHECK(quotes.at("quotations") == body.at("quotations"));
  }
}

TEST_CASE("a span with no activity gives empty lists") {
  const auto f = corpus50();
  const auto body = f.get_json("/api/entity/helen-carter", {{"from", "2010-01-01"}, {"to", "2010-12-31"}});
  CHECK(body.at("articles").empty());
  CHECK(body.at("quotations").empty());
  CHECK(body.at("related").empty());
  for (const auto& b : body.at("timeline")) CHECK(b.at("count") == 0);
  CHECK(body.at("span").at("from") == "2010-01-01");
  CHECK(body.at("span").at("to") == "2010-12-31");
}

TEST_CASE("network responses") {
  SUBCASE("empty archive") {
    const Fixture empty("", "gazetteer.tsv");
    const auto body = empty.get_json("/api/network");
    CHECK(body.at("nodes").empty());
    CHECK(body.at("edges").empty());
  }
  SUBCASE("ego view matches the graph") {
    const auto f = corpus50();
    const auto snap = f.archive.snapshot();
    const QueryParams params{{"entity", "helen-carter"}, {"from", "2015-01-01"}, {"to", "2015-02-28"}, {"max_nodes", "5"}};
    const auto body = f.get_json("/api/network", params);
    const LabelLookup label = [&](const std::string& id) { return snap->registry.find(id)->canonical_name; };
    const auto view = snap->graph.ego_network("helen-carter", DaySpan{parse_day("2015-01-01"), parse_day("2015-02-28")},
                                              5, label);
    CHECK(body == to_json(view));
    CHECK(body.at("nodes").size() <= 5);
  }
  SUBCASE("layouts are reproducible") {
    const auto f = corpus50();
    const QueryParams params{{"layout", "true"}, {"top_k", "12"}};
    const auto a = f.get("/api/network", params);
    const auto b = f.get("/api/network", params);
    REQUIRE(a.status == 200);
    CHECK(a.body == b.body);
    const auto body = json::parse(a.body);
    CHECK(body.at("nodes").size() == 12);
    for (const auto& n : body.at("nodes")) {
      CHECK(n.at("pos").at("x").is_number());
      CHECK(n.at("pos").at("y").is_number());
    }
  }
}

TEST_CASE("ingest over the API and stats") {
  Fixture f("", "gazetteer.tsv");
  const auto before = f.get_json("/api/stats");
  CHECK(before.at("articles") == 0);
  CHECK(before.at("generation") == 0);

  const auto r = f.api.handle("POST", "/api/ingest", {}, testing::read_fixture("corpus50.jsonl"));
  REQUIRE(r.status == 200);
  const auto report = json::parse(r.body);
  CHECK(report.at("articles") == 50);
  CHECK(report.at("errors").empty());

  const auto stats = f.get_json("/api/stats");
  CHECK(stats.at("generation") == 1);
  CHECK(stats.at("articles") == 50);
  CHECK(stats.at("entities") == f.archive.snapshot()->registry.size());
  CHECK(stats.at("quotations") == f.archive.snapshot()->quotation_count());
  const auto& top = stats.at("top_entities");
  for (std::size_t i = 1; i < top.size(); ++i)
    CHECK(top[i - 1].at("articles").get<int>() >= top[i].at("articles").get<int>());
}

TEST_CASE("reads have no side effects") {
  const auto f = corpus50();
  const auto before = f.archive.snapshot();
  f.get("/api/search", {{"q", "budget"}});
  f.get("/api/entity/helen-carter");
  f.get("/api/network", {{"layout", "true"}});
  f.get("/api/stats");
  f.get("/api/search", {{"q", ""}});
  const auto after = f.archive.snapshot();
  CHECK(after == before);
  CHECK(*after == *before);
}

}
