#include "chronolens/graph.hpp"

#include <algorithm>

#include "chronolens/errors.hpp"
#include "chronolens/index.hpp"

namespace chronolens {

bool NetworkView::endpoints_closed() const {
  std::set<std::string_view> ids;
  for (const auto& n : nodes) ids.insert(n.id);
  return std::all_of(edges.begin(), edges.end(),
                     [&](const ViewEdge& e) { return ids.count(e.a) != 0 && ids.count(e.b) != 0; });
}

nlohmann::json to_json(const NetworkView& view) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : view.nodes)
    nodes.push_back({{"id", n.id}, {"label", n.label}, {"weight", n.weight}, {"color_key", n.color_key}});
  auto edges = nlohmann::json::array();
  for (const auto& e : view.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  nlohmann::json span = {{"from", nullptr}, {"to", nullptr}};
  if (view.span) span = {{"from", format_day(view.span->from)}, {"to", format_day(view.span->to)}};
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"span", std::move(span)}};
}

namespace {

CoocGraph::EdgeKey edge_key(std::string_view a, std::string_view b) {
  return a < b ? CoocGraph::EdgeKey{std::string(a), std::string(b)} : CoocGraph::EdgeKey{std::string(b), std::string(a)};
}

} // namespace

std::size_t CoocGraph::update(Day day, std::string_view category, const std::vector<std::string>& entities) {
  const std::set<std::string> unique(entities.begin(), entities.end());
  for (const auto& e : unique) {
    auto& node = nodes_[e];
    ++node.mentions[day];
    if (!category.empty()) ++node.categories[day][std::string(category)];
  }
  std::size_t pairs = 0;
  for (auto a = unique.begin(); a != unique.end(); ++a) {
    for (auto b = std::next(a); b != unique.end(); ++b) {
      ++edges_[{*a, *b}][day];
      adjacency_[*a].insert(*b);
      adjacency_[*b].insert(*a);
      ++pairs;
    }
  }
  return pairs;
}

bool CoocGraph::has_node(std::string_view id) const { return nodes_.count(std::string(id)) != 0; }

std::uint64_t CoocGraph::node_weight(std::string_view id, const OptionalSpan& span) const {
  auto it = nodes_.find(std::string(id));
  return it == nodes_.end() ? 0 : sum_in_span(it->second.mentions, span);
}

std::uint64_t CoocGraph::edge_weight(std::string_view a, std::string_view b, const OptionalSpan& span) const {
  if (a == b) return 0;
  auto it = edges_.find(edge_key(a, b));
  return it == edges_.end() ? 0 : sum_in_span(it->second, span);
}

std::string CoocGraph::color_key(std::string_view id, const OptionalSpan& span) const {
  auto it = nodes_.find(std::string(id));
  if (it == nodes_.end()) return {};
  std::map<std::string, std::uint64_t> totals;
  for (const auto& [day, cats] : it->second.categories) {
    if (!in_span(span, day)) continue;
    for (const auto& [cat, n] : cats) totals[cat] += n;
  }
  std::string best;
  std::uint64_t count = 0;
  for (const auto& [cat, n] : totals) {
    if (n > count) {
      best = cat;
      count = n;
    }
  }
  return best;
}

std::vector<std::pair<std::string, std::uint64_t>> CoocGraph::neighbors(std::string_view id,
                                                                        const OptionalSpan& span) const {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  auto it = adjacency_.find(std::string(id));
  if (it == adjacency_.end()) return out;
  for (const auto& other : it->second) {
    const auto w = edge_weight(id, other, span);
    if (w > 0) out.emplace_back(other, w);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  return out;
}

namespace {

void add_edges_among(const CoocGraph& g, NetworkView& view, const OptionalSpan& span) {
  std::vector<std::string> ids;
  for (const auto& n : view.nodes) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const auto w = g.edge_weight(ids[i], ids[j], span);
      if (w >= 1) view.edges.push_back({ids[i], ids[j], w});
    }
  }
}

ViewNode make_node(const CoocGraph& g, const std::string& id, const OptionalSpan& span, const LabelLookup& label) {
  return {id, label ? label(id) : id, g.node_weight(id, span), g.color_key(id, span)};
}

} // namespace

NetworkView CoocGraph::ego_network(std::string_view entity_id, const OptionalSpan& span, std::size_t max_nodes,
                                   const LabelLookup& label) const {
  if (!has_node(entity_id)) throw UnknownEntity("unknown entity '" + std::string(entity_id) + "'");
  NetworkView view;
  view.span = span;
  const std::string center(entity_id);
  view.nodes.push_back(make_node(*this, center, span, label));
  if (max_nodes > 1) {
    auto ranked = neighbors(entity_id, span);
    if (ranked.size() > max_nodes - 1) ranked.resize(max_nodes - 1);
    for (const auto& [id, w] : ranked) view.nodes.push_back(make_node(*this, id, span, label));
  }
  add_edges_among(*this, view, span);
  return view;
}

NetworkView CoocGraph::global_network(const OptionalSpan& span, std::size_t top_k, const LabelLookup& label) const {
  NetworkView view;
  view.span = span;
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  for (const auto& [id, stats] : nodes_) {
    const auto w = sum_in_span(stats.mentions, span);
    if (w > 0) ranked.emplace_back(id, w);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  for (const auto& [id, w] : ranked) view.nodes.push_back(make_node(*this, id, span, label));
  add_edges_among(*this, view, span);
  return view;
}

nlohmann::json CoocGraph::to_json() const {
  auto nodes = nlohmann::json::array();
  for (const auto& [id, stats] : nodes_) {
    auto mentions = nlohmann::json::array();
    for (const auto& [day, n] : stats.mentions) mentions.push_back(nlohmann::json::array({day, n}));
    auto cats = nlohmann::json::array();
    for (const auto& [day, m] : stats.categories)
      for (const auto& [cat, n] : m) cats.push_back(nlohmann::json::array({day, cat, n}));
    nodes.push_back({{"id", id}, {"mentions", std::move(mentions)}, {"categories", std::move(cats)}});
  }
  auto edges = nlohmann::json::array();
  for (const auto& [key, days] : edges_) {
    auto counts = nlohmann::json::array();
    for (const auto& [day, n] : days) counts.push_back(nlohmann::json::array({day, n}));
    edges.push_back({{"a", key.first}, {"b", key.second}, {"counts", std::move(counts)}});
  }
  return {{"format", "chronolens-graph"}, {"version", 1}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

CoocGraph CoocGraph::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "chronolens-graph" || j.value("version", 0) != 1)
    throw SnapshotError("not a version 1 graph snapshot");
  CoocGraph g;
  for (const auto& n : j.at("nodes")) {
    auto& stats = g.nodes_[n.at("id").get<std::string>()];
    for (const auto& c : n.at("mentions")) stats.mentions[c.at(0).get<Day>()] = c.at(1).get<std::uint32_t>();
    for (const auto& c : n.at("categories"))
      stats.categories[c.at(0).get<Day>()][c.at(1).get<std::string>()] = c.at(2).get<std::uint32_t>();
  }
  for (const auto& e : j.at("edges")) {
    auto a = e.at("a").get<std::string>();
    auto b = e.at("b").get<std::string>();
    if (!(a < b)) throw SnapshotError("graph edge endpoints out of order or self-edge");
    auto& days = g.edges_[{a, b}];
    for (const auto& c : e.at("counts")) days[c.at(0).get<Day>()] = c.at(1).get<std::uint32_t>();
    g.adjacency_[a].insert(b);
    g.adjacency_[b].insert(a);
  }
  return g;
}

} // namespace chronolens
