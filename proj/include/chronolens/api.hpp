#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "chronolens/archive.hpp"
#include "chronolens/layout.hpp"

namespace chronolens {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json; charset=utf-8";
};

using QueryParams = std::map<std::string, std::string>;

/// 64-bit FNV-1a, used to derive layout seeds from request spans.
std::uint64_t fnv1a(std::string_view data) noexcept;

struct ApiOptions {
  std::size_t default_limit = 10;
  std::size_t max_limit = 1000;
  std::size_t default_max_nodes = 25;
  std::size_t default_top_k = 50;
  std::size_t related_limit = 10;
  /// Window of `GET /api/stats`, ending at the newest archived day.
  int stats_days = 30;
  LayoutParams layout;
};

/// Transport-independent JSON API. Every response is computed from a single
/// archive snapshot; only `POST /api/ingest` changes state.
///
///   GET  /api/search?q=&from=&to=&limit=
///   GET  /api/entity/{id}?from=&to=&granularity=
///   GET  /api/entity/{id}/quotes?from=&to=&kind=
///   GET  /api/network?entity=&from=&to=&max_nodes=&top_k=&layout=
///   POST /api/ingest            (body: JSON lines)
///   GET  /api/stats?days=&limit=
///
/// Errors carry `{"code": ..., "message": ...}` with status 400 (bad
/// parameters, empty query), 404 (unknown entity or route), 405 or 422
/// (inverted span).
class Api {
public:
  explicit Api(Archive& archive, ApiOptions options = {}) : archive_(archive), options_(std::move(options)) {}

  Response handle(std::string_view method, std::string_view path, const QueryParams& params,
                  std::string_view body = {}) const;

private:
  nlohmann::json search(const ArchiveState& s, const QueryParams& p) const;
  nlohmann::json entity(const ArchiveState& s, const std::string& id, const QueryParams& p) const;
  nlohmann::json entity_quotes(const ArchiveState& s, const std::string& id, const QueryParams& p) const;
  nlohmann::json network(const ArchiveState& s, const QueryParams& p) const;
  nlohmann::json stats(const ArchiveState& s, const QueryParams& p) const;

  Archive& archive_;
  ApiOptions options_;
};

} // namespace chronolens
