#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace chronolens::text {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point at `pos` and advances past it. Invalid sequences
/// decode to U+FFFD and consume a single byte.
char32_t decode(std::string_view s, std::size_t& pos) noexcept;
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp) noexcept;
bool is_letter(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
inline bool is_alnum(char32_t cp) noexcept { return is_letter(cp) || is_digit(cp); }
bool is_upper(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

std::string lowercase(std::string_view s);

/// True when the first code point of `s` is an uppercase letter.
bool starts_upper(std::string_view s) noexcept;
/// True when `s` is non-empty and made only of letters and digits.
bool is_word(std::string_view s) noexcept;

/// Collapses every whitespace run to one ASCII space and trims both ends.
std::string collapse_spaces(std::string_view s);

/// Lowercase ASCII slug joined by '-'; Latin accents are transliterated and
/// other characters act as separators.
std::string slugify(std::string_view s);

/// Reads a UTF-8 list file: one entry per line, trailing CR and surrounding
/// whitespace stripped, blank lines and lines starting with '#' skipped.
std::vector<std::string> read_list_file(const std::filesystem::path& path);
/// Same rules applied to in-memory contents.
std::vector<std::string> parse_list(std::string_view contents);

std::string read_file(const std::filesystem::path& path);

using WordSet = std::unordered_set<std::string>;

/// Parses `[section]` style config files into section -> entry lines, using
/// the list-file rules for comments and blank lines. Lines before the first
/// header land in section "".
std::map<std::string, std::vector<std::string>> parse_sections(std::string_view contents);

} // namespace chronolens::text
