#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace quizgen {

enum class Method { savaal, direct, summary, single_prompt };

std::string_view to_string(Method m);
/// Throws Error for an unknown method name.
Method method_from_string(std::string_view s);

struct Question {
    std::string id;
    std::string stem;
    std::array<std::string, 4> choices;
    int correct_index = 0;
    std::optional<std::string> idea_title;
    std::vector<std::string> passage_ids;
    Method method = Method::savaal;

    const std::string& correct_text() const { return choices.at(static_cast<std::size_t>(correct_index)); }
};

/// Exactly four non-empty, pairwise distinct choices, non-empty stem, key in 0..3.
/// On failure `why` (if given) receives the reason.
bool is_valid(const Question& q, std::string* why = nullptr);

inline char choice_letter(int index) { return static_cast<char>('A' + index); }

/// "A. ...\nB. ...\nC. ...\nD. ..."
std::string format_options(const Question& q);
/// Stem, labelled choices and a "Correct Answer: X. text" line.
std::string format_mcq(const Question& q);

/// Extracts question blocks: a stem, choices labelled A. through D., and a
/// "Correct Answer: X" line. Markdown bullets and bold markers are ignored.
/// Throws ParseFailure for a block with a missing answer line, a choice count
/// other than four, an unknown answer letter, or when no block is found.
std::vector<Question> parse_mcq(std::string_view text);

/// Stable id from (doc_id, method, stem).
std::string question_id(std::string_view doc_id, Method method, std::string_view stem);

/// Unbiased draw from [0, n) using only the generator's raw output, so
/// sequences are identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Uniform permutation of the four choices; the key follows the correct text.
Question shuffle_choices(Question q, std::mt19937_64& rng);

/// Lowercased, whitespace-collapsed stem.
std::string normalize_stem(std::string_view stem);
/// Jaccard similarity of word 3-gram sets over normalized stems.
double shingle_jaccard(std::string_view a, std::string_view b);

inline constexpr double kDuplicateJaccard = 0.9;

/// Equal normalized stems, or shingle Jaccard >= 0.9.
bool is_duplicate(const Question& a, const Question& b);

/// Keeps the first occurrence of each question under is_duplicate.
std::vector<Question> dedupe_questions(const std::vector<Question>& qs);

}  // namespace quizgen
