#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quizgen/ingest.hpp"
#include "quizgen/llm.hpp"

namespace quizgen {

struct MainIdea {
    std::string title;
    std::string description;
    int rank = 0;  // 1 = most important
    std::string source_doc;

    /// "Title: description", the form used in prompts and retrieval queries.
    std::string as_text() const { return title + ": " + description; }
};

inline constexpr std::size_t kDefaultContextWindow = 128000;
inline constexpr int kMaxReduceRounds = 3;

/// One map call: concept notes for a single section.
/// Throws std::invalid_argument for a blank section.
std::string map_extract(const LlmClient& llm, const Section& section);

/// map_extract over every section, concurrently under the client's cap.
std::vector<std::string> map_sections(const LlmClient& llm, const Document& doc);

/// Sequential groups of notes whose combine prompt fits `window_tokens`.
/// A single oversized note forms its own group.
std::vector<std::vector<std::string>> group_notes(const std::vector<std::string>& notes,
                                                  std::size_t window_tokens);

/// Merges concept notes into one list: one combine call per group, repeated
/// over the group results until a single note remains.
/// Throws std::invalid_argument on an empty list.
std::string combine(const LlmClient& llm, const std::vector<std::string>& notes,
                    std::size_t window_tokens = kDefaultContextWindow);

/// Parses "N. Title: description", "Title: [description]" and
/// "- **Title**: description" lines. Titles are deduplicated
/// case-insensitively; ranks are provisional (listed order).
/// Throws ParseFailure when no entry is recognised.
std::vector<MainIdea> parse_idea_list(std::string_view text, const std::string& source_doc = {});

/// Runs the reduce prompt (at most kMaxReduceRounds times) while the text
/// exceeds `window_tokens`, then parses the idea list.
std::vector<MainIdea> reduce_ideas(const LlmClient& llm, const std::string& combined,
                                   std::size_t window_tokens = kDefaultContextWindow,
                                   const std::string& source_doc = {});

/// Reads a rank array such as "[2, 1, 3]" where entry i is the rank of idea i.
/// Returns nullopt unless it is a permutation of 1..m.
std::optional<std::vector<int>> parse_rank_permutation(std::string_view reply, std::size_t m);

struct RankOutcome {
    std::vector<MainIdea> ideas;  // sorted by rank
    bool fell_back = false;       // reply was unusable; listed order kept
    std::string warning;
};

/// Asks the LLM to rank ideas. An unusable reply keeps the input order and
/// assigns ranks 1..M. A single idea needs no call.
RankOutcome rank_ideas_detailed(const LlmClient& llm, std::vector<MainIdea> ideas);
std::vector<MainIdea> rank_ideas(const LlmClient& llm, std::vector<MainIdea> ideas);

}  // namespace quizgen
