#include <doctest.h>

#include <fstream>

#include "chronolens/errors.hpp"
#include "chronolens/snapshot.hpp"
#include "fixtures.hpp"

using namespace chronolens;
namespace fs = std::filesystem;

namespace {

ArchiveState fixture_state() {
  const auto config = testing::fixture_config();
  return ingest_batch(ArchiveState(config), testing::read_fixture("corpus50.jsonl"), config).first;
}

} // namespace

TEST_SUITE("snapshot") {

TEST_CASE("save and load round-trip the whole state") {
  testing::TempDir dir;
  const auto state = fixture_state();
  CHECK_FALSE(load_snapshot(dir.path()).has_value());
  save_snapshot(state, dir.path());
  for (const char* f : {"manifest.json", "registry.json", "index.json", "graph.json", "quotations.jsonl",
                        "snippets.jsonl", "articles.jsonl"})
    CHECK(fs::exists(dir.path() / "snapshot" / f));
  CHECK_FALSE(fs::exists(dir.path() / "snapshot.tmp"));
  CHECK_FALSE(fs::exists(dir.path() / "snapshot.old"));
  const auto loaded = load_snapshot(dir.path());
  REQUIRE(loaded.has_value());
  CHECK(*loaded == state);
}

TEST_CASE("serialization is deterministic") {
  const auto state = fixture_state();
  const auto a = serialize_snapshot(state);
  CHECK(a == serialize_snapshot(state));
  CHECK(serialize_snapshot(deserialize_snapshot(a)) == a);
  const auto manifest = nlohmann::json::parse(a.at("manifest.json"));
  CHECK(manifest.at("format") == "chronolens-snapshot");
  CHECK(manifest.at("generation") == state.generation);
}

TEST_CASE("an interrupted swap falls back to the previous snapshot") {
  testing::TempDir dir;
  const auto state = fixture_state();
  save_snapshot(state, dir.path());
  // Crash after the live directory moved aside but before the new one landed.
  fs::rename(dir.path() / "snapshot", dir.path() / "snapshot.old");
  fs::create_directories(dir.path() / "snapshot.tmp");
  const auto loaded = load_snapshot(dir.path());
  REQUIRE(loaded.has_value());
  CHECK(*loaded == state);
  // The next save cleans up the leftovers.
  save_snapshot(state, dir.path());
  CHECK(fs::exists(dir.path() / "snapshot"));
  CHECK_FALSE(fs::exists(dir.path() / "snapshot.old"));
  CHECK_FALSE(fs::exists(dir.path() / "snapshot.tmp"));
}

TEST_CASE("corrupt snapshots are reported") {
  testing::TempDir dir;
  save_snapshot(fixture_state(), dir.path());
  std::ofstream(dir.path() / "snapshot" / "manifest.json") << "{\"format\": \"something-else\"}";
  CHECK_THROWS_AS(load_snapshot(dir.path()), SnapshotError);
  auto files = serialize_snapshot(fixture_state());
  files.erase("graph.json");
  CHECK_THROWS_AS(deserialize_snapshot(files), SnapshotError);
}

TEST_CASE("an archive directory persists across restarts") {
  testing::TempDir dir;
  fs::copy_file(testing::fixture_path("gazetteer.tsv"), dir.path() / "gazetteer.tsv");
  {
    Archive archive(dir.path());
    archive.ingest(testing::read_fixture("corpus50.jsonl"));
  }
  Archive reloaded(dir.path());
  CHECK(reloaded.snapshot()->generation == 1);
  CHECK(reloaded.snapshot()->articles.size() == 50);
  // Ingesting the same corpus again is a no-op that keeps the generation.
  const auto report = reloaded.ingest(testing::read_fixture("corpus50.jsonl"));
  CHECK(report.articles == 0);
  CHECK(reloaded.snapshot()->generation == 1);
}

}
