#include "chronolens/ner.hpp"

#include <algorithm>

#include "chronolens/errors.hpp"
#include "chronolens/resources.hpp"

namespace chronolens {

std::string_view to_string(Tag tag) noexcept {
  switch (tag) {
    case Tag::O: return "O";
    case Tag::B: return "B-PER";
    case Tag::I: return "I-PER";
  }
  return "O";
}

Tag parse_tag(std::string_view s) {
  if (s == "O") return Tag::O;
  if (s == "B-PER") return Tag::B;
  if (s == "I-PER") return Tag::I;
  throw MalformedInput("unknown tag '" + std::string(s) + "'");
}

bool is_valid_bio(std::span<const Tag> tags) noexcept {
  Tag prev = Tag::O;
  for (Tag t : tags) {
    if (t == Tag::I && prev == Tag::O) return false;
    prev = t;
  }
  return true;
}

void repair_bio(std::vector<Tag>& tags) noexcept {
  Tag prev = Tag::O;
  for (Tag& t : tags) {
    if (t == Tag::I && prev == Tag::O) t = Tag::B;
    prev = t;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> per_spans(std::span<const Tag> tags) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < tags.size();) {
    if (tags[i] == Tag::O) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == Tag::I) ++j;
    spans.emplace_back(i, j);
    i = j;
  }
  return spans;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

// ---------------------------------------------------------------------------
// Gazetteer

Gazetteer Gazetteer::parse(std::string_view contents) {
  Gazetteer gaz;
  for (const auto& line : text::parse_list(contents)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) gaz.add(line);
    else gaz.add_alias(line.substr(0, tab), line.substr(tab + 1));
  }
  return gaz;
}

Gazetteer Gazetteer::from_file(const std::filesystem::path& path) { return parse(text::read_file(path)); }

void Gazetteer::index(std::string_view surface, const std::string& canonical) {
  auto tokens = token_texts(tokenize(surface));
  if (tokens.empty()) return;
  for (const auto& t : tokens)
    if (text::is_word(t)) token_set_.insert(text::lowercase(t));
  max_tokens_ = std::max(max_tokens_, tokens.size());
  by_tokens_.emplace(std::move(tokens), canonical);
}

void Gazetteer::add(std::string_view canonical_raw) {
  auto canonical = text::collapse_spaces(canonical_raw);
  if (canonical.empty()) return;
  entries_.insert(canonical);
  // A canonical entry takes precedence over an alias with the same tokens.
  auto tokens = token_texts(tokenize(canonical));
  by_tokens_.erase(tokens);
  index(canonical, canonical);
}

void Gazetteer::add_alias(std::string_view alias_raw, std::string_view canonical_raw) {
  auto alias = text::collapse_spaces(alias_raw);
  auto canonical = text::collapse_spaces(canonical_raw);
  if (alias.empty() || canonical.empty()) return;
  add(canonical);
  if (entries_.count(alias) != 0) return;
  aliases_[alias] = canonical;
  index(alias, canonical);
}

std::optional<std::string> Gazetteer::canonical_for(std::string_view surface) const {
  auto it = by_tokens_.find(token_texts(tokenize(surface)));
  if (it == by_tokens_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Gazetteer::aliases_of(std::string_view canonical) const {
  std::vector<std::string> out;
  for (const auto& [alias, target] : aliases_)
    if (target == canonical) out.push_back(alias);
  return out;
}

std::size_t Gazetteer::longest_match(std::span<const std::string> tokens, std::size_t start) const {
  const std::size_t limit = std::min(max_tokens_, tokens.size() - start);
  std::vector<std::string> probe;
  for (std::size_t len = limit; len > 0; --len) {
    probe.assign(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                 tokens.begin() + static_cast<std::ptrdiff_t>(start + len));
    if (by_tokens_.count(probe) != 0) return len;
  }
  return 0;
}

TagSequence dictionary_annotate(std::vector<std::string> tokens, const Gazetteer& gaz) {
  TagSequence seq;
  seq.tags.assign(tokens.size(), Tag::O);
  for (std::size_t i = 0; i < tokens.size();) {
    const auto len = gaz.longest_match(tokens, i);
    if (len == 0) {
      ++i;
      continue;
    }
    seq.tags[i] = Tag::B;
    for (std::size_t k = 1; k < len; ++k) seq.tags[i + k] = Tag::I;
    i += len;
  }
  seq.tokens = std::move(tokens);
  return seq;
}

std::vector<TagSequence> dictionary_annotate(const std::vector<Passage>& units, const Gazetteer& gaz) {
  std::vector<TagSequence> out;
  out.reserve(units.size());
  for (const auto& unit : units) out.push_back(dictionary_annotate(token_texts(unit.tokens), gaz));
  return out;
}

// ---------------------------------------------------------------------------
// Mentions

std::vector<Mention> extract_mentions(std::string_view doc_id, const std::vector<Passage>& units,
                                      const std::vector<std::vector<Tag>>& tags) {
  std::vector<Mention> mentions;
  for (std::size_t s = 0; s < units.size() && s < tags.size(); ++s) {
    const auto& tokens = units[s].tokens;
    for (auto [b, e] : per_spans(tags[s])) {
      Mention m;
      m.doc_id = doc_id;
      m.sentence_index = s;
      m.start = b;
      m.end = e;
      m.surface = units[s].text.substr(tokens[b].begin, tokens[e - 1].end - tokens[b].begin);
      mentions.push_back(std::move(m));
    }
  }
  return mentions;
}

std::string EntityProfile::top_profession() const {
  std::string best;
  std::uint32_t count = 0;
  for (const auto& [name, n] : professions) {
    if (n > count) {
      best = name;
      count = n;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Registry

const EntityProfile* EntityRegistry::find(std::string_view entity_id) const {
  auto it = profiles_.find(std::string(entity_id));
  return it == profiles_.end() ? nullptr : &it->second;
}

EntityProfile& EntityRegistry::at(std::string_view entity_id) {
  auto it = profiles_.find(std::string(entity_id));
  if (it == profiles_.end()) throw UnknownEntity("unknown entity '" + std::string(entity_id) + "'");
  return it->second;
}

std::optional<std::string> EntityRegistry::lookup(std::string_view surface) const {
  auto it = names_.find(text::collapse_spaces(surface));
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

EntityProfile& EntityRegistry::create(std::string_view canonical_raw, const std::vector<std::string>& aliases) {
  const auto canonical = text::collapse_spaces(canonical_raw);
  if (canonical.empty()) throw MalformedInput("entity canonical name is empty");
  auto base = text::slugify(canonical);
  if (base.empty()) base = "entity";
  auto id = base;
  for (int n = 2; profiles_.count(id) != 0; ++n) id = base + "-" + std::to_string(n);

  EntityProfile profile;
  profile.entity_id = id;
  profile.canonical_name = canonical;
  names_.try_emplace(canonical, id);
  for (const auto& alias : aliases) {
    const auto a = text::collapse_spaces(alias);
    if (a.empty() || a == canonical) continue;
    profile.known_aliases.insert(a);
    names_.try_emplace(a, id);
  }
  return profiles_.emplace(id, std::move(profile)).first->second;
}

nlohmann::json EntityRegistry::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& [id, p] : profiles_) {
    nlohmann::json professions = nlohmann::json::object();
    for (const auto& [name, n] : p.professions) professions[name] = n;
    arr.push_back({{"entity_id", id},
                   {"canonical_name", p.canonical_name},
                   {"aliases", p.known_aliases},
                   {"professions", professions},
                   {"first_seen", p.first_seen},
                   {"last_seen", p.last_seen},
                   {"mention_count", p.mention_count}});
  }
  return {{"entities", arr}};
}

EntityRegistry EntityRegistry::from_json(const nlohmann::json& j) {
  EntityRegistry reg;
  for (const auto& e : j.at("entities")) {
    EntityProfile p;
    p.entity_id = e.at("entity_id").get<std::string>();
    p.canonical_name = e.at("canonical_name").get<std::string>();
    p.known_aliases = e.at("aliases").get<std::set<std::string>>();
    for (const auto& [name, n] : e.at("professions").items()) p.professions[name] = n.get<std::uint32_t>();
    p.first_seen = e.at("first_seen").get<Timestamp>();
    p.last_seen = e.at("last_seen").get<Timestamp>();
    p.mention_count = e.at("mention_count").get<std::uint32_t>();
    if (p.canonical_name.empty() || p.first_seen > p.last_seen)
      throw MalformedInput("invalid entity record '" + p.entity_id + "'");
    reg.names_.try_emplace(p.canonical_name, p.entity_id);
    for (const auto& a : p.known_aliases) reg.names_.try_emplace(a, p.entity_id);
    reg.profiles_.emplace(p.entity_id, std::move(p));
  }
  return reg;
}

// ---------------------------------------------------------------------------
// Disambiguation

NerPatterns NerPatterns::parse(std::string_view contents) {
  NerPatterns patterns;
  auto sections = text::parse_sections(contents);
  for (const auto& w : sections["job_words"]) patterns.job_words.insert(text::lowercase(w));
  for (const auto& w : sections["determiners"]) patterns.determiners.insert(text::lowercase(w));
  for (const auto& line : sections["descriptor"]) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bad descriptor setting '" + line + "'");
    const auto key = text::collapse_spaces(line.substr(0, eq));
    const auto value = text::collapse_spaces(line.substr(eq + 1));
    if (key == "max_tokens") {
      try {
        patterns.max_descriptor_tokens = static_cast<std::size_t>(std::stoul(value));
      } catch (const std::exception&) {
        throw ConfigError("bad max_tokens value '" + value + "'");
      }
    } else {
      throw ConfigError("unknown descriptor setting '" + key + "'");
    }
  }
  return patterns;
}

NerPatterns NerPatterns::from_file(const std::filesystem::path& path) { return parse(text::read_file(path)); }

NerPatterns NerPatterns::defaults() { return parse(resources::ner_patterns()); }

namespace {

std::vector<std::string> word_tokens(const Passage& unit, std::size_t start, std::size_t end) {
  std::vector<std::string> out;
  for (auto i = start; i < end; ++i)
    if (text::is_word(unit.tokens[i].text)) out.push_back(unit.tokens[i].text);
  return out;
}

bool is_suffix(const std::vector<std::string>& shorter, const std::vector<std::string>& longer) {
  return shorter.size() < longer.size() && std::equal(shorter.rbegin(), shorter.rend(), longer.rbegin());
}

bool is_subset(const std::vector<std::string>& shorter, const std::vector<std::string>& longer) {
  if (shorter.size() >= longer.size()) return false;
  return std::all_of(shorter.begin(), shorter.end(),
                     [&](const std::string& t) { return std::find(longer.begin(), longer.end(), t) != longer.end(); });
}

// `<PER> , <descriptor> ,` with the descriptor made of word tokens (hyphens
// and apostrophes allowed), free of other mentions, and headed either by a
// lowercase word or a configured job word.
std::string job_descriptor(const Mention& m, const Passage& unit, const std::vector<Mention>& all,
                           const NerPatterns& patterns) {
  const auto& toks = unit.tokens;
  if (m.end >= toks.size() || toks[m.end].text != ",") return {};
  const std::size_t first = m.end + 1;
  std::size_t close = first;
  while (close < toks.size() && toks[close].text != "," && close - first < patterns.max_descriptor_tokens) ++close;
  if (close == first || close >= toks.size() || toks[close].text != ",") return {};
  for (auto i = first; i < close; ++i) {
    const auto& t = toks[i].text;
    if (!text::is_word(t) && t != "-" && t != "'" && t != "’") return {};
  }
  if (!text::is_word(toks[first].text)) return {};
  for (const auto& other : all) {
    if (other.sentence_index == m.sentence_index && other.start < close && other.end > first) return {};
  }
  auto start = first;
  while (start + 1 < close && patterns.determiners.count(text::lowercase(toks[start].text)) != 0) ++start;
  const auto& head = toks[start].text;
  if (text::starts_upper(head) && patterns.job_words.count(text::lowercase(head)) == 0) return {};
  return unit.text.substr(toks[start].begin, toks[close - 1].end - toks[start].begin);
}

} // namespace

ResolveStats disambiguate(std::vector<Mention>& mentions, const std::vector<Passage>& units, EntityRegistry& registry,
                          const NerPatterns& patterns, Timestamp published_at, const Gazetteer* gaz) {
  ResolveStats stats;
  std::stable_sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
    return std::tie(a.sentence_index, a.start) < std::tie(b.sentence_index, b.start);
  });

  std::vector<std::vector<std::string>> tokens_of(mentions.size());
  for (std::size_t k = 0; k < mentions.size(); ++k) {
    auto& m = mentions[k];
    m.entity_id.clear();
    const auto& unit = units.at(m.sentence_index);
    tokens_of[k] = word_tokens(unit, m.start, m.end);
    m.job_descriptor = job_descriptor(m, unit, mentions, patterns);
  }

  for (std::size_t k = 0; k < mentions.size(); ++k) {
    auto& m = mentions[k];
    const auto& toks = tokens_of[k];

    for (std::size_t p = k; p-- > 0 && !m.resolved();) {
      if (!mentions[p].resolved()) continue;
      if (is_suffix(toks, tokens_of[p]) || is_subset(toks, tokens_of[p])) m.entity_id = mentions[p].entity_id;
    }
    if (!m.resolved()) {
      if (auto id = registry.lookup(m.surface)) m.entity_id = *id;
    }
    if (!m.resolved() && gaz) {
      if (auto canonical = gaz->canonical_for(m.surface)) {
        if (auto id = registry.lookup(*canonical)) {
          m.entity_id = *id;
        } else {
          m.entity_id = registry.create(*canonical, gaz->aliases_of(*canonical)).entity_id;
          ++stats.entities_created;
        }
      }
    }
    if (!m.resolved() && toks.size() >= 2) {
      std::vector<std::string> aliases;
      if (gaz) aliases = gaz->aliases_of(m.surface);
      m.entity_id = registry.create(m.surface, aliases).entity_id;
      ++stats.entities_created;
    }

    if (!m.resolved()) {
      ++stats.unresolved;
      continue;
    }
    ++stats.resolved;
    auto& profile = registry.at(m.entity_id);
    if (profile.mention_count++ == 0) {
      profile.first_seen = profile.last_seen = published_at;
    } else {
      profile.first_seen = std::min(profile.first_seen, published_at);
      profile.last_seen = std::max(profile.last_seen, published_at);
    }
    if (!m.job_descriptor.empty()) ++profile.professions[m.job_descriptor];
  }
  return stats;
}

} // namespace chronolens
