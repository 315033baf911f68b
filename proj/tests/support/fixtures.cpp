#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef CHRONOLENS_FIXTURES
#error "CHRONOLENS_FIXTURES must point at tests/fixtures"
#endif

namespace chronolens::testing {

std::filesystem::path fixture_path(std::string_view name) {
  return std::filesystem::path(CHRONOLENS_FIXTURES) / std::string(name);
}

std::string read_fixture(std::string_view name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + std::string(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig fixture_config(std::string_view gazetteer) {
  PipelineConfig config;
  config.gazetteer = Gazetteer::from_file(fixture_path(gazetteer));
  return config;
}

namespace {

// "YYYY-MM-DDTHH:MM:SSZ" -> seconds since the epoch.
Timestamp utc_seconds(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &se) != 6)
    throw std::runtime_error("bad gold timestamp " + s);
  using namespace std::chrono;
  const sys_days date = year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)};
  return duration_cast<seconds>(date.time_since_epoch()).count() + h * 3600 + mi * 60 + se;
}

} // namespace

std::vector<GoldArticle> load_gold(std::string_view name) {
  const auto j = nlohmann::json::parse(read_fixture(name));
  std::vector<GoldArticle> out;
  for (const auto& a : j.at("articles")) {
    GoldArticle g;
    g.doc_id = a.at("doc_id");
    g.published_at = utc_seconds(a.at("published_at"));
    g.day = static_cast<Day>(g.published_at / 86400);
    g.category = a.at("category");
    for (const auto& u : a.at("units"))
      g.units.push_back({u.at("text"), u.at("entities"), u.at("terms")});
    for (const auto& q : a.at("quotations"))
      g.quotations.push_back({q.at("entity_id"), q.at("unit"), q.at("kind"), q.at("text")});
    out.push_back(std::move(g));
  }
  return out;
}

RawDocument raw_doc(std::string doc_id, std::string published_at, std::string title, std::string body,
                    std::string category, std::string source) {
  return {std::move(doc_id), std::move(source), std::move(category), std::move(published_at), std::move(title),
          std::move(body)};
}

std::string to_jsonl(const std::vector<RawDocument>& docs) {
  std::string out;
  for (const auto& d : docs) out += to_json(d).dump() + "\n";
  return out;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("chronolens-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

} // namespace chronolens::testing
