#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chronolens/ner.hpp"

namespace chronolens::testing {

/// Deterministic person-name corpus with gold BIO labels. Every person is
/// mentioned by full name in an attribution context ("X said"); a fraction
/// of the distinct names goes into the gazetteer.
struct SyntheticCorpus {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::vector<Tag>> gold;
  std::vector<std::string> names;
  std::vector<std::string> gazetteer_names;
  Gazetteer gazetteer;
};

struct SyntheticOptions {
  std::size_t sentences = 1000;
  std::size_t distinct_names = 200;
  double gazetteer_coverage = 0.5;
  std::uint64_t seed = 2015;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options = {});

/// Fraction of gold PER tokens (B or I) tagged PER in `predicted`.
double per_token_recall(const std::vector<std::vector<Tag>>& gold, const std::vector<TagSequence>& predicted);

} // namespace chronolens::testing
