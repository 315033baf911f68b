#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronolens/ingest.hpp"
#include "chronolens/text.hpp"
#include "chronolens/time.hpp"

namespace chronolens {

// ---------------------------------------------------------------------------
// Tags

enum class Tag : std::uint8_t { O = 0, B = 1, I = 2 };
inline constexpr std::size_t kTagCount = 3;

/// "O", "B-PER", "I-PER"
std::string_view to_string(Tag tag) noexcept;
Tag parse_tag(std::string_view s);

/// I-PER never follows O or the sequence start.
bool is_valid_bio(std::span<const Tag> tags) noexcept;
/// Rewrites every illegal I-PER as B-PER.
void repair_bio(std::vector<Tag>& tags) noexcept;

/// Token-level PER spans [start, end) of a BIO sequence.
std::vector<std::pair<std::size_t, std::size_t>> per_spans(std::span<const Tag> tags);

struct TagSequence {
  std::vector<std::string> tokens;
  std::vector<Tag> tags;

  friend bool operator==(const TagSequence&, const TagSequence&) = default;
};

std::vector<std::string> token_texts(const std::vector<Token>& tokens);

// ---------------------------------------------------------------------------
// Gazetteer

/// Dictionary of person names. Names and aliases are matched token by token,
/// case-sensitively, after whitespace normalization.
class Gazetteer {
public:
  /// Lines are `canonical_name` or `alias<TAB>canonical_name`.
  static Gazetteer parse(std::string_view contents);
  static Gazetteer from_file(const std::filesystem::path& path);

  void add(std::string_view canonical);
  void add_alias(std::string_view alias, std::string_view canonical);

  bool empty() const noexcept { return entries_.empty(); }
  const std::set<std::string>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::string>& aliases() const noexcept { return aliases_; }

  /// Canonical name for an exact name or alias surface.
  std::optional<std::string> canonical_for(std::string_view surface) const;
  /// Aliases registered for a canonical name.
  std::vector<std::string> aliases_of(std::string_view canonical) const;

  /// Length of the longest name starting at `start`, 0 when none matches.
  std::size_t longest_match(std::span<const std::string> tokens, std::size_t start) const;

  /// Lowercased word tokens of every name and alias.
  const text::WordSet& token_set() const noexcept { return token_set_; }

private:
  void index(std::string_view surface, const std::string& canonical);

  std::set<std::string> entries_;
  std::map<std::string, std::string> aliases_;
  std::map<std::vector<std::string>, std::string> by_tokens_;
  text::WordSet token_set_;
  std::size_t max_tokens_ = 0;
};

/// Leftmost-longest dictionary matching, one sequence per analysis unit.
std::vector<TagSequence> dictionary_annotate(const std::vector<Passage>& units, const Gazetteer& gaz);
TagSequence dictionary_annotate(std::vector<std::string> tokens, const Gazetteer& gaz);

// ---------------------------------------------------------------------------
// Sequence model

struct TrainOptions {
  int epochs = 8;
  std::uint64_t seed = 17;
};

/// Linear-chain sequence model over {O, B-PER, I-PER}: per-token emission
/// features plus label-transition weights, decoded exactly with Viterbi.
class SequenceModel {
public:
  SequenceModel() = default;

  int version() const noexcept { return version_; }
  void set_version(int v) noexcept { version_ = v; }

  /// Highest-scoring BIO-valid label sequence.
  std::vector<Tag> tag(std::span<const std::string> tokens) const;
  /// Model score of a given labeling.
  double score(std::span<const std::string> tokens, std::span<const Tag> tags) const;

  /// Versioned flat text format, byte-stable for identical weights:
  ///   chronolens-tagger 1
  ///   version <n>
  ///   gaz <token>                   (one per in-gazetteer token)
  ///   trans <from> <to> <weight>    (from includes START)
  ///   emit <feature> <label> <weight>
  /// Fields are tab-separated; weights use 17 significant digits.
  void save(std::ostream& out) const;
  static SequenceModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static SequenceModel load(const std::filesystem::path& path);

  const text::WordSet& gazetteer_tokens() const noexcept { return gazetteer_tokens_; }
  std::size_t feature_count() const noexcept { return emission_.size(); }

  friend bool operator==(const SequenceModel&, const SequenceModel&) = default;

  using Row = std::array<double, kTagCount>;
  /// Row 3 is the sequence start.
  using Transitions = std::array<Row, kTagCount + 1>;

private:
  friend SequenceModel train_tagger(std::span<const TagSequence>, const TrainOptions&, const Gazetteer*);

  std::map<std::string, Row> emission_;
  Transitions transition_{};
  text::WordSet gazetteer_tokens_;
  int version_ = 0;
};

/// Emission features of token `i`. Exposed for tests.
std::vector<std::string> token_features(std::span<const std::string> tokens, std::size_t i,
                                        const text::WordSet& gazetteer_tokens);

/// Averaged structured perceptron. Throws EmptyTrainingSet when there is no
/// sentence with at least one token. Deterministic for fixed input and seed.
SequenceModel train_tagger(std::span<const TagSequence> training, const TrainOptions& options = {},
                           const Gazetteer* gaz = nullptr);

/// Union of PER spans; on overlap the dictionary span wins.
std::vector<Tag> merge_annotations(std::span<const Tag> model, std::span<const Tag> dictionary);

/// Fraction of tokens labeled identically in two passes over the same corpus.
double token_agreement(std::span<const TagSequence> a, std::span<const TagSequence> b);

struct BootstrapOptions {
  int max_iters = 10;
  double stabilization_threshold = 0.999;
  /// One epoch per pass: the seed labels miss every uncovered name, and
  /// longer training memorizes those misses instead of generalizing.
  TrainOptions train{.epochs = 1};
};

struct BootstrapIteration {
  int iteration = 0;
  /// Annotations produced by this pass (iteration 0: dictionary only).
  std::vector<TagSequence> annotations;
  /// Agreement with the previous pass; absent for iteration 0.
  std::optional<double> agreement;
  std::size_t per_tokens = 0;
};

struct BootstrapResult {
  SequenceModel model;
  std::vector<BootstrapIteration> trace;
  bool stabilized = false;
};

/// Self-training loop: train on dictionary annotations, then repeatedly
/// re-annotate the seed corpus with the current model, merge with the
/// dictionary and retrain until two successive passes agree on at least the
/// stabilization threshold of tokens or max_iters passes have run.
BootstrapResult bootstrap(std::span<const std::vector<std::string>> sentences, const Gazetteer& gaz,
                          const BootstrapOptions& options = {});
BootstrapResult bootstrap(std::span<const NewsArticle> corpus, const Segmenter& segmenter, const Gazetteer& gaz,
                          const BootstrapOptions& options = {});

// ---------------------------------------------------------------------------
// Mentions and disambiguation

struct Mention {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::size_t start = 0; ///< token index, inclusive
  std::size_t end = 0;   ///< token index, exclusive
  std::string surface;
  std::string entity_id; ///< empty when unresolved
  std::string job_descriptor;

  bool resolved() const noexcept { return !entity_id.empty(); }
  friend bool operator==(const Mention&, const Mention&) = default;
};

/// One mention per PER span. Surfaces are the source text between the first
/// and last token of the span.
std::vector<Mention> extract_mentions(std::string_view doc_id, const std::vector<Passage>& units,
                                      const std::vector<std::vector<Tag>>& tags);

struct EntityProfile {
  std::string entity_id;
  std::string canonical_name;
  std::set<std::string> known_aliases;
  std::map<std::string, std::uint32_t> professions;
  Timestamp first_seen = 0;
  Timestamp last_seen = 0;
  std::uint32_t mention_count = 0;

  /// Most frequent job descriptor; ties go to the smallest string.
  std::string top_profession() const;
  friend bool operator==(const EntityProfile&, const EntityProfile&) = default;
};

/// Canonical entity records keyed by slug id, with a name/alias lookup.
class EntityRegistry {
public:
  const EntityProfile* find(std::string_view entity_id) const;
  /// Entity whose canonical name or alias equals `surface`.
  std::optional<std::string> lookup(std::string_view surface) const;
  /// Creates a profile with a fresh slug id (numeric suffix on collision).
  EntityProfile& create(std::string_view canonical_name, const std::vector<std::string>& aliases = {});
  EntityProfile& at(std::string_view entity_id);

  const std::map<std::string, EntityProfile>& profiles() const noexcept { return profiles_; }
  std::size_t size() const noexcept { return profiles_.size(); }

  nlohmann::json to_json() const;
  static EntityRegistry from_json(const nlohmann::json& j);

  friend bool operator==(const EntityRegistry&, const EntityRegistry&) = default;

private:
  std::map<std::string, EntityProfile> profiles_;
  std::map<std::string, std::string> names_;
};

/// Configurable news heuristics for disambiguation.
struct NerPatterns {
  /// Lowercased descriptor heads accepted even when capitalized.
  text::WordSet job_words;
  /// Leading words dropped from a descriptor ("the coach" -> "coach").
  text::WordSet determiners;
  std::size_t max_descriptor_tokens = 8;

  static NerPatterns parse(std::string_view contents);
  static NerPatterns from_file(const std::filesystem::path& path);
  static NerPatterns defaults();
};

struct ResolveStats {
  std::size_t resolved = 0;
  std::size_t unresolved = 0;
  std::size_t entities_created = 0;
};

/// Resolves the mentions of one article in document order:
///   (a) `<PER> , <descriptor> ,` captures the job descriptor;
///   (b) a shorter mention takes the entity of the most recent preceding
///       mention whose tokens end with, or contain all of, its tokens;
///   (c) registry canonical name or alias, then gazetteer name or alias;
///   (d) otherwise a new profile when the surface has two or more word
///       tokens, else the mention stays unresolved.
/// Resolved mentions update the matching profiles (professions, first/last
/// seen).
ResolveStats disambiguate(std::vector<Mention>& mentions, const std::vector<Passage>& units, EntityRegistry& registry,
                          const NerPatterns& patterns, Timestamp published_at, const Gazetteer* gaz = nullptr);

} // namespace chronolens
