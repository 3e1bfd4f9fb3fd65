#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quip {

std::string trim(std::string_view s);
// Trims and collapses every whitespace run to a single space.
std::string normalize_whitespace(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);
bool is_blank(std::string_view s);

// Word tokens, lowercased. A token is a run of ASCII alphanumerics,
// apostrophes, or non-ASCII bytes, with edge apostrophes stripped; tokens
// with no letter are dropped.
std::vector<std::string> tokenize(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Splits on commas and newlines, trims, drops empties and case-insensitive
// duplicates. Strips list markers and surrounding quotes.
std::vector<std::string> split_lenient_list(std::string_view text);

// 64-bit FNV-1a. `basis` lets callers fold a seed into the hash.
std::uint64_t fnv1a(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace quip
