#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chronolens/time.hpp"

namespace chronolens {

struct NodeStats {
  /// Articles mentioning the entity, per UTC day.
  std::map<Day, std::uint32_t> mentions;
  /// Article categories per day; the empty category is not recorded.
  std::map<Day, std::map<std::string, std::uint32_t>> categories;

  friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

struct ViewNode {
  std::string id;
  std::string label;
  std::uint64_t weight = 0;
  std::string color_key;

  friend bool operator==(const ViewNode&, const ViewNode&) = default;
};

struct ViewEdge {
  std::string a;
  std::string b;
  std::uint64_t weight = 0;

  friend bool operator==(const ViewEdge&, const ViewEdge&) = default;
};

struct NetworkView {
  std::vector<ViewNode> nodes;
  std::vector<ViewEdge> edges;
  OptionalSpan span;

  /// Every edge endpoint is a node of the view.
  bool endpoints_closed() const;
  friend bool operator==(const NetworkView&, const NetworkView&) = default;
};

/// Wire format `{nodes:[{id,label,weight,color_key}], edges:[{a,b,weight}],
/// span:{from,to}}`; span bounds are ISO dates or null.
nlohmann::json to_json(const NetworkView& view);

using LabelLookup = std::function<std::string(const std::string&)>;

/// Incremental co-occurrence graph with article-level counting: each article
/// adds one to every mentioned entity and one to every unordered pair.
class CoocGraph {
public:
  using EdgeKey = std::pair<std::string, std::string>; // first < second

  /// Duplicates in `entities` count once.
  /// Returns the number of distinct pairs touched.
  std::size_t update(Day day, std::string_view category, const std::vector<std::string>& entities);

  bool has_node(std::string_view id) const;
  std::uint64_t node_weight(std::string_view id, const OptionalSpan& span = std::nullopt) const;
  /// Symmetric in (a, b); zero when absent or a == b.
  std::uint64_t edge_weight(std::string_view a, std::string_view b, const OptionalSpan& span = std::nullopt) const;
  /// Argmax category inside the span; ties go to the smallest name.
  std::string color_key(std::string_view id, const OptionalSpan& span = std::nullopt) const;

  /// Center plus its strongest in-span neighbors (ranked by edge weight,
  /// then id), at most `max_nodes` nodes in total, and every in-span edge
  /// among them. Throws UnknownEntity for ids never seen.
  NetworkView ego_network(std::string_view entity_id, const OptionalSpan& span, std::size_t max_nodes,
                          const LabelLookup& label = {}) const;
  /// `top_k` entities by in-span mention count (then id) and all in-span
  /// edges among them.
  NetworkView global_network(const OptionalSpan& span, std::size_t top_k, const LabelLookup& label = {}) const;

  /// Neighbors of an entity with in-span edge weight, strongest first.
  std::vector<std::pair<std::string, std::uint64_t>> neighbors(std::string_view id, const OptionalSpan& span) const;

  const std::map<std::string, NodeStats>& nodes() const noexcept { return nodes_; }
  const std::map<EdgeKey, std::map<Day, std::uint32_t>>& edges() const noexcept { return edges_; }

  nlohmann::json to_json() const;
  static CoocGraph from_json(const nlohmann::json& j);

  friend bool operator==(const CoocGraph&, const CoocGraph&) = default;

private:
  std::map<std::string, NodeStats> nodes_;
  std::map<EdgeKey, std::map<Day, std::uint32_t>> edges_;
  std::map<std::string, std::set<std::string>> adjacency_;
};

} // namespace chronolens
