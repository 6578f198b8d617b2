#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quizgen::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool is_blank(std::string_view s);

/// Whitespace-separated words.
std::vector<std::string_view> split_words(std::string_view s);
std::size_t count_words(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace quizgen::text
