#pragma once

#include <string_view>

/// Built-in copies of the configuration files under data/, embedded at
/// build time. Files in a data directory override them.
namespace chronolens::resources {

std::string_view abbreviations() noexcept;
std::string_view stopwords() noexcept;
std::string_view quote_patterns() noexcept;
std::string_view ner_patterns() noexcept;

} // namespace chronolens::resources
