#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chronolens/archive.hpp"
#include "chronolens/time.hpp"

namespace chronolens::testing {

std::filesystem::path fixture_path(std::string_view name);
std::string read_fixture(std::string_view name);

/// Default pipeline plus a gazetteer from the fixture directory.
PipelineConfig fixture_config(std::string_view gazetteer = "gazetteer.tsv");

struct GoldUnit {
  std::string text;
  std::vector<std::string> entities;
  std::vector<std::string> terms;
};

struct GoldQuote {
  std::string entity_id;
  std::size_t unit = 0;
  std::string kind;
  std::string text;
};

struct GoldArticle {
  std::string doc_id;
  Timestamp published_at = 0;
  Day day = 0;
  std::string category;
  std::vector<GoldUnit> units;
  std::vector<GoldQuote> quotations;
};

/// Reads gold50.json. Timestamps are converted with std::chrono rather
/// than the library's own parser.
std::vector<GoldArticle> load_gold(std::string_view name = "gold50.json");

RawDocument raw_doc(std::string doc_id, std::string published_at, std::string title, std::string body,
                    std::string category = "news", std::string source = "test");
/// One JSON line per document.
std::string to_jsonl(const std::vector<RawDocument>& docs);

/// A fresh temporary directory, removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace chronolens::testing
