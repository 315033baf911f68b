#include "chronolens/snapshot.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "chronolens/errors.hpp"

namespace chronolens {

namespace fs = std::filesystem;

namespace {

constexpr int kSnapshotVersion = 1;

std::string jsonl(const std::vector<nlohmann::json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<nlohmann::json> parse_rows(const std::string& contents, const std::string& file) {
  std::vector<nlohmann::json> rows;
  std::istringstream in(contents);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw SnapshotError(file + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

nlohmann::json parse_doc(const std::map<std::string, std::string>& files, const std::string& name) {
  auto it = files.find(name);
  if (it == files.end()) throw SnapshotError("snapshot is missing " + name);
  try {
    return nlohmann::json::parse(it->second);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(name + ": " + e.what());
  }
}

const std::string& file_contents(const std::map<std::string, std::string>& files, const std::string& name) {
  auto it = files.find(name);
  if (it == files.end()) throw SnapshotError("snapshot is missing " + name);
  return it->second;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  out.flush();
  if (!out) throw SnapshotError("cannot write " + path.string());
}

} // namespace

std::map<std::string, std::string> serialize_snapshot(const ArchiveState& state) {
  std::map<std::string, std::string> files;
  files["registry.json"] = state.registry.to_json().dump() + "\n";
  files["index.json"] = state.index.to_json().dump() + "\n";
  files["graph.json"] = state.graph.to_json().dump() + "\n";

  std::vector<nlohmann::json> rows;
  for (const auto& [id, qs] : state.quotations)
    for (const auto& q : qs) rows.push_back(to_json(q));
  files["quotations.jsonl"] = jsonl(rows);

  rows.clear();
  for (const auto& [id, ss] : state.snippets)
    for (const auto& s : ss)
      rows.push_back({{"entity_id", s.entity_id},
                      {"doc_id", s.doc_id},
                      {"sentence_index", s.sentence_index},
                      {"text", s.text},
                      {"published_at", format_timestamp(s.published_at)}});
  files["snippets.jsonl"] = jsonl(rows);

  rows.clear();
  for (const auto& [id, meta] : state.articles) rows.push_back(to_json(meta));
  files["articles.jsonl"] = jsonl(rows);

  nlohmann::json manifest = {{"format", "chronolens-snapshot"},
                             {"version", kSnapshotVersion},
                             {"generation", state.generation},
                             {"articles", state.articles.size()},
                             {"entities", state.registry.size()}};
  files["manifest.json"] = manifest.dump(2) + "\n";
  return files;
}

ArchiveState deserialize_snapshot(const std::map<std::string, std::string>& files) {
  const auto manifest = parse_doc(files, "manifest.json");
  if (manifest.value("format", "") != "chronolens-snapshot" || manifest.value("version", 0) != kSnapshotVersion)
    throw SnapshotError("unsupported snapshot manifest");
  ArchiveState state;
  try {
    state.generation = manifest.at("generation").get<std::uint64_t>();
    state.registry = EntityRegistry::from_json(parse_doc(files, "registry.json"));
    state.index = EntityIndex::from_json(parse_doc(files, "index.json"));
    state.graph = CoocGraph::from_json(parse_doc(files, "graph.json"));
    for (const auto& r : parse_rows(file_contents(files, "quotations.jsonl"), "quotations.jsonl")) {
      auto q = quotation_from_json(r);
      state.quotations[q.entity_id].push_back(std::move(q));
    }
    for (const auto& r : parse_rows(file_contents(files, "snippets.jsonl"), "snippets.jsonl")) {
      Snippet s{r.at("entity_id").get<std::string>(), r.at("doc_id").get<std::string>(),
                r.at("sentence_index").get<std::size_t>(), r.at("text").get<std::string>(),
                parse_timestamp(r.at("published_at").get<std::string>())};
      state.snippets[s.entity_id].push_back(std::move(s));
    }
    for (const auto& r : parse_rows(file_contents(files, "articles.jsonl"), "articles.jsonl")) {
      auto meta = article_meta_from_json(r);
      state.articles.emplace(meta.doc_id, std::move(meta));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  } catch (const SnapshotError&) {
    throw;
  } catch (const Error& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  }
  return state;
}

void save_snapshot(const ArchiveState& state, const fs::path& dir) {
  const auto files = serialize_snapshot(state);
  const auto live = dir / "snapshot";
  const auto tmp = dir / "snapshot.tmp";
  const auto old = dir / "snapshot.old";
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::remove_all(tmp, ec);
  if (!fs::create_directories(tmp, ec) && ec) throw SnapshotError("cannot create " + tmp.string() + ": " + ec.message());
  for (const auto& [name, contents] : files) write_file(tmp / name, contents);

  fs::remove_all(old, ec);
  if (fs::exists(live)) {
    fs::rename(live, old, ec);
    if (ec) throw SnapshotError("cannot retire " + live.string() + ": " + ec.message());
  }
  fs::rename(tmp, live, ec);
  if (ec) throw SnapshotError("cannot publish " + live.string() + ": " + ec.message());
  fs::remove_all(old, ec);
}

std::optional<ArchiveState> load_snapshot(const fs::path& dir) {
  fs::path source = dir / "snapshot";
  if (!fs::is_directory(source)) source = dir / "snapshot.old";
  if (!fs::is_directory(source)) return std::nullopt;
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[entry.path().filename().string()] = buf.str();
  }
  return deserialize_snapshot(files);
}

} // namespace chronolens
