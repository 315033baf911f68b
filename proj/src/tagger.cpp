#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "chronolens/errors.hpp"
#include "chronolens/ner.hpp"

namespace chronolens {

namespace {

constexpr std::size_t kStart = kTagCount;

std::string shape(std::string_view tok) {
  bool upper = false, lower = false, digit = false, other = false;
  bool first_upper = false;
  bool first = true;
  for (std::size_t pos = 0; pos < tok.size();) {
    const char32_t cp = text::decode(tok, pos);
    if (text::is_digit(cp)) digit = true;
    else if (text::is_upper(cp)) {
      upper = true;
      if (first) first_upper = true;
    } else if (text::is_letter(cp)) lower = true;
    else other = true;
    first = false;
  }
  if (other) return "p";
  if (digit) return (upper || lower) ? "m" : "d";
  if (first_upper && !lower) return tok.size() == 1 ? "X" : "XX";
  if (first_upper) return "Xx";
  if (upper) return "m";
  return "x";
}

} // namespace

std::vector<std::string> token_features(std::span<const std::string> tokens, std::size_t i,
                                        const text::WordSet& gazetteer_tokens) {
  std::vector<std::string> f;
  f.reserve(6);
  const auto lower = text::lowercase(tokens[i]);
  f.emplace_back("b");
  f.push_back("w=" + lower);
  f.push_back("p=" + (i == 0 ? std::string("<s>") : text::lowercase(tokens[i - 1])));
  f.push_back("n=" + (i + 1 == tokens.size() ? std::string("</s>") : text::lowercase(tokens[i + 1])));
  f.push_back("s=" + shape(tokens[i]));
  if (gazetteer_tokens.count(lower) != 0) f.emplace_back("g=1");
  return f;
}

namespace {

// Weights indexed by dense feature id during training and decoding.
struct DenseWeights {
  std::vector<SequenceModel::Row> emission;
  SequenceModel::Transitions transition{};
};

bool allowed(std::size_t prev, std::size_t cur) {
  return !(cur == static_cast<std::size_t>(Tag::I) && (prev == kStart || prev == static_cast<std::size_t>(Tag::O)));
}

// Constrained Viterbi. `emit(i, label)` yields the emission score.
template <typename Emit>
std::vector<Tag> viterbi(std::size_t n, const SequenceModel::Transitions& trans, Emit emit) {
  std::vector<Tag> out(n, Tag::O);
  if (n == 0) return out;
  constexpr double kNeg = -std::numeric_limits<double>::infinity();
  std::vector<std::array<double, kTagCount>> best(n);
  std::vector<std::array<std::uint8_t, kTagCount>> back(n);
  for (std::size_t y = 0; y < kTagCount; ++y) {
    best[0][y] = allowed(kStart, y) ? trans[kStart][y] + emit(0, y) : kNeg;
    back[0][y] = 0;
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < kTagCount; ++y) {
      double top = kNeg;
      std::uint8_t arg = 0;
      for (std::size_t p = 0; p < kTagCount; ++p) {
        if (!allowed(p, y) || best[i - 1][p] == kNeg) continue;
        const double s = best[i - 1][p] + trans[p][y];
        if (s > top) {
          top = s;
          arg = static_cast<std::uint8_t>(p);
        }
      }
      best[i][y] = top == kNeg ? kNeg : top + emit(i, y);
      back[i][y] = arg;
    }
  }
  std::size_t y = 0;
  for (std::size_t c = 1; c < kTagCount; ++c)
    if (best[n - 1][c] > best[n - 1][y]) y = c;
  for (std::size_t i = n; i-- > 0;) {
    out[i] = static_cast<Tag>(y);
    y = back[i][y];
  }
  return out;
}

struct Encoded {
  std::vector<std::vector<std::uint32_t>> features; // per token
  std::vector<Tag> gold;
};

class Trainer {
public:
  Trainer(std::span<const TagSequence> data, const text::WordSet& gaz_tokens) {
    for (const auto& seq : data) {
      if (seq.tokens.empty()) continue;
      if (seq.tags.size() != seq.tokens.size()) throw MalformedInput("tag sequence length differs from token count");
      Encoded e;
      e.gold = seq.tags;
      repair_bio(e.gold);
      for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        std::vector<std::uint32_t> ids;
        for (auto& f : token_features(seq.tokens, i, gaz_tokens)) ids.push_back(intern(std::move(f)));
        e.features.push_back(std::move(ids));
      }
      data_.push_back(std::move(e));
    }
  }

  bool empty() const { return data_.empty(); }

  SequenceModel::Row zero_row() const { return {}; }

  // Averaged perceptron with the usual lazy-averaging accumulator:
  // averaged = w - u / c where u accumulates c * update.
  void run(const TrainOptions& options) {
    const std::size_t nf = names_.size();
    w_.emission.assign(nf, zero_row());
    u_.emission.assign(nf, zero_row());
    w_.transition = {};
    u_.transition = {};
    std::vector<std::size_t> order(data_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(options.seed);
    double c = 1.0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
      // Fisher-Yates with raw engine output so the permutation does not
      // depend on the standard library's distribution implementation.
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
      for (std::size_t idx : order) {
        const auto& e = data_[idx];
        const auto predicted = viterbi(e.gold.size(), w_.transition, [&](std::size_t i, std::size_t y) {
          double s = 0;
          for (auto f : e.features[i]) s += w_.emission[f][y];
          return s;
        });
        if (predicted != e.gold) {
          update(e, e.gold, +1.0, c);
          update(e, predicted, -1.0, c);
        }
        c += 1.0;
      }
    }
    averaged_ = w_;
    for (std::size_t f = 0; f < nf; ++f)
      for (std::size_t y = 0; y < kTagCount; ++y) averaged_.emission[f][y] -= u_.emission[f][y] / c;
    for (std::size_t p = 0; p <= kTagCount; ++p)
      for (std::size_t y = 0; y < kTagCount; ++y) averaged_.transition[p][y] -= u_.transition[p][y] / c;
  }

  const DenseWeights& averaged() const { return averaged_; }
  const std::vector<std::string>& names() const { return names_; }

private:
  std::uint32_t intern(std::string name) {
    auto [it, inserted] = ids_.try_emplace(std::move(name), static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(it->first);
    return it->second;
  }

  void update(const Encoded& e, const std::vector<Tag>& tags, double delta, double c) {
    std::size_t prev = kStart;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      const auto y = static_cast<std::size_t>(tags[i]);
      for (auto f : e.features[i]) {
        w_.emission[f][y] += delta;
        u_.emission[f][y] += c * delta;
      }
      w_.transition[prev][y] += delta;
      u_.transition[prev][y] += c * delta;
      prev = y;
    }
  }

  std::vector<Encoded> data_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
  DenseWeights w_, u_, averaged_;
};

} // namespace

SequenceModel train_tagger(std::span<const TagSequence> training, const TrainOptions& options, const Gazetteer* gaz) {
  text::WordSet gaz_tokens;
  if (gaz) gaz_tokens = gaz->token_set();
  Trainer trainer(training, gaz_tokens);
  if (trainer.empty()) throw EmptyTrainingSet("no non-empty training sentences");
  trainer.run(options);

  SequenceModel model;
  model.gazetteer_tokens_ = std::move(gaz_tokens);
  model.transition_ = trainer.averaged().transition;
  const auto& names = trainer.names();
  for (std::size_t f = 0; f < names.size(); ++f) {
    const auto& row = trainer.averaged().emission[f];
    if (row[0] != 0.0 || row[1] != 0.0 || row[2] != 0.0) model.emission_.emplace(names[f], row);
  }
  return model;
}

std::vector<Tag> SequenceModel::tag(std::span<const std::string> tokens) const {
  std::vector<std::vector<const Row*>> rows(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& f : token_features(tokens, i, gazetteer_tokens_)) {
      auto it = emission_.find(f);
      if (it != emission_.end()) rows[i].push_back(&it->second);
    }
  }
  auto tags = viterbi(tokens.size(), transition_, [&](std::size_t i, std::size_t y) {
    double s = 0;
    for (const Row* r : rows[i]) s += (*r)[y];
    return s;
  });
  repair_bio(tags);
  return tags;
}

double SequenceModel::score(std::span<const std::string> tokens, std::span<const Tag> tags) const {
  if (tags.size() != tokens.size()) throw MalformedInput("tag sequence length differs from token count");
  double s = 0;
  std::size_t prev = kStart;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto y = static_cast<std::size_t>(tags[i]);
    for (const auto& f : token_features(tokens, i, gazetteer_tokens_)) {
      auto it = emission_.find(f);
      if (it != emission_.end()) s += it->second[y];
    }
    s += transition_[prev][y];
    prev = y;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::string_view kMagic = "chronolens-tagger\t1";

std::string_view label_name(std::size_t y) { return y == kStart ? "START" : to_string(static_cast<Tag>(y)); }

std::size_t label_index(std::string_view s) {
  if (s == "START") return kStart;
  return static_cast<std::size_t>(parse_tag(s));
}

std::string format_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

double parse_weight(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) throw MalformedInput("bad weight '" + s + "'");
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

} // namespace

void SequenceModel::save(std::ostream& out) const {
  out << kMagic << '\n' << "version\t" << version_ << '\n';
  std::vector<std::string> gaz(gazetteer_tokens_.begin(), gazetteer_tokens_.end());
  std::sort(gaz.begin(), gaz.end());
  for (const auto& t : gaz) out << "gaz\t" << t << '\n';
  for (std::size_t p = 0; p <= kTagCount; ++p)
    for (std::size_t y = 0; y < kTagCount; ++y)
      out << "trans\t" << label_name(p) << '\t' << label_name(y) << '\t' << format_weight(transition_[p][y]) << '\n';
  for (const auto& [feature, row] : emission_)
    for (std::size_t y = 0; y < kTagCount; ++y)
      if (row[y] != 0.0) out << "emit\t" << feature << '\t' << label_name(y) << '\t' << format_weight(row[y]) << '\n';
}

SequenceModel SequenceModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw MalformedInput("not a chronolens tagger model");
  SequenceModel model;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    try {
      if (f[0] == "version" && f.size() == 2) {
        model.version_ = std::stoi(f[1]);
        if (model.version_ < 0) throw MalformedInput("negative version");
      } else if (f[0] == "gaz" && f.size() == 2) {
        model.gazetteer_tokens_.insert(f[1]);
      } else if (f[0] == "trans" && f.size() == 4) {
        const auto to = label_index(f[2]);
        if (to == kStart) throw MalformedInput("START is not a target label");
        model.transition_[label_index(f[1])][to] = parse_weight(f[3]);
      } else if (f[0] == "emit" && f.size() == 4) {
        const auto y = label_index(f[2]);
        if (y == kStart) throw MalformedInput("START is not an emission label");
        model.emission_[f[1]][y] = parse_weight(f[3]);
      } else {
        throw MalformedInput("unknown record");
      }
    } catch (const std::exception& e) {
      throw MalformedInput("model line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return model;
}

void SequenceModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  save(out);
}

SequenceModel SequenceModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return load(in);
}

// ---------------------------------------------------------------------------
// Bootstrap

std::vector<Tag> merge_annotations(std::span<const Tag> model, std::span<const Tag> dictionary) {
  std::vector<Tag> out(dictionary.begin(), dictionary.end());
  std::vector<bool> taken(out.size(), false);
  for (auto [s, e] : per_spans(dictionary))
    for (auto i = s; i < e; ++i) taken[i] = true;
  for (auto [s, e] : per_spans(model)) {
    bool overlap = false;
    for (auto i = s; i < e && !overlap; ++i) overlap = taken[i];
    if (overlap) continue;
    out[s] = Tag::B;
    for (auto i = s + 1; i < e; ++i) out[i] = Tag::I;
  }
  return out;
}

double token_agreement(std::span<const TagSequence> a, std::span<const TagSequence> b) {
  if (a.size() != b.size()) throw MalformedInput("annotation passes cover different corpora");
  std::size_t total = 0, same = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s].tags.size() != b[s].tags.size()) throw MalformedInput("annotation passes tokenized differently");
    for (std::size_t i = 0; i < a[s].tags.size(); ++i) {
      ++total;
      same += a[s].tags[i] == b[s].tags[i];
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(same) / static_cast<double>(total);
}

namespace {

std::size_t count_per(std::span<const TagSequence> seqs) {
  std::size_t n = 0;
  for (const auto& s : seqs)
    for (Tag t : s.tags) n += t != Tag::O;
  return n;
}

} // namespace

BootstrapResult bootstrap(std::span<const std::vector<std::string>> sentences, const Gazetteer& gaz,
                          const BootstrapOptions& options) {
  if (options.max_iters < 1) throw MalformedInput("max_iters must be at least 1");
  std::vector<TagSequence> dictionary;
  dictionary.reserve(sentences.size());
  for (const auto& s : sentences) dictionary.push_back(dictionary_annotate(s, gaz));

  BootstrapResult result;
  result.model = train_tagger(dictionary, options.train, &gaz);
  result.model.set_version(0);
  result.trace.push_back({0, dictionary, std::nullopt, count_per(dictionary)});

  for (int it = 1; it < options.max_iters; ++it) {
    std::vector<TagSequence> pass;
    pass.reserve(dictionary.size());
    for (const auto& d : dictionary) pass.push_back({d.tokens, merge_annotations(result.model.tag(d.tokens), d.tags)});
    const double agreement = token_agreement(pass, result.trace.back().annotations);
    const auto per = count_per(pass);
    result.trace.push_back({it, std::move(pass), agreement, per});
    if (agreement >= options.stabilization_threshold) {
      result.stabilized = true;
      break;
    }
    result.model = train_tagger(result.trace.back().annotations, options.train, &gaz);
    result.model.set_version(it);
  }
  return result;
}

BootstrapResult bootstrap(std::span<const NewsArticle> corpus, const Segmenter& segmenter, const Gazetteer& gaz,
                          const BootstrapOptions& options) {
  std::vector<std::vector<std::string>> sentences;
  for (const auto& article : corpus)
    for (const auto& unit : analysis_units(article, segmenter))
      if (!unit.tokens.empty()) sentences.push_back(token_texts(unit.tokens));
  return bootstrap(sentences, gaz, options);
}

} // namespace chronolens
