#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "quizgen/concepts.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/ingest.hpp"
#include "quizgen/llm.hpp"
#include "quizgen/mcq.hpp"

namespace quizgen {

struct QuizRequest {
    std::size_t n = 20;
    Method method = Method::savaal;
    std::size_t k = 3;
    std::size_t batch_b = 20;
    std::uint64_t seed = 0;
    bool refine = false;

    /// Throws std::invalid_argument unless n >= 1, batch_b >= 1 and k >= 1.
    void validate() const;
};

struct Quiz {
    std::string doc_id;
    std::string title;
    Method method = Method::savaal;
    std::string model;
    std::uint64_t seed = 0;
    std::vector<Question> questions;
    TokenUsage usage_totals;
    std::string created_at;  // ISO-8601 UTC
};

struct IdeaAllocation {
    MainIdea idea;
    std::size_t count = 0;
};

/// Question counts per idea, in rank order. With fewer questions than ideas
/// the top-N ideas get one each; otherwise floor(N/M) each with the remainder
/// going one apiece to the best-ranked ideas.
std::vector<IdeaAllocation> allocate_questions(std::size_t n, const std::vector<MainIdea>& ideas);

/// Re-attempts after a malformed or short generation reply.
inline constexpr int kParseReattempts = 2;

/// Passage texts separated by blank lines, as placed in generation prompts.
std::string format_passages(const std::vector<Passage>& passages);

/// One savaal_generate call (plus re-attempts) for `idea`, returning exactly
/// `n` questions tagged with the idea title and passage ids.
/// Throws ParseFailure once the re-attempts are spent.
std::vector<Question> generate_for_idea(const LlmClient& llm, const MainIdea& idea,
                                        const std::vector<Passage>& passages, std::size_t n,
                                        std::string_view doc_id = {});

/// Multi-turn batched generation over `context`: the first turn uses
/// direct_generate, later turns direct_additional in the same conversation.
/// Stops at N unique questions or after ceil(N/b) + 2 turns.
/// Throws InsufficientQuestions when N unique questions were not collected.
std::vector<Question> generate_batched(const LlmClient& llm, const std::string& context, const QuizRequest& req,
                                       Method method, std::string_view doc_id = {});

std::vector<Question> generate_direct(const LlmClient& llm, const Document& doc, const QuizRequest& req);

/// Per-section summaries (ledger tag map) condensed by one reduce call.
std::string summarize_map_reduce(const LlmClient& llm, const Document& doc);

std::vector<Question> generate_from_summary(const LlmClient& llm, const Document& doc, const QuizRequest& req);
/// Same, with a summary already in hand.
std::vector<Question> generate_from_summary(const LlmClient& llm, const Document& doc, const std::string& summary,
                                            const QuizRequest& req);

/// Line that introduces the answer block in the single-prompt reply.
inline constexpr std::string_view kFinalBlockMarker = "FINAL QUESTIONS";

/// Prompt that chains every stage's instructions ahead of the full document.
std::string single_prompt_text(const Document& doc, std::size_t n);

/// One LLM call; questions are read from the block after kFinalBlockMarker
/// (or the whole reply when the marker is absent).
/// Throws ParseFailure when no question block is found and
/// InsufficientQuestions when fewer than N unique questions come back.
std::vector<Question> generate_single_prompt(const LlmClient& llm, const Document& doc, const QuizRequest& req);

/// A refine reply changed the correct choice or was unreadable.
class RefineViolation : public Error {
public:
    RefineViolation(const std::string& what, Question original)
        : Error(what), original_(std::move(original)) {}
    const Question& original() const noexcept { return original_; }

private:
    Question original_;
};

/// Replaces the three distractors through the refine prompt. The correct
/// choice text must come back verbatim. Disabled means identity, no call.
/// Throws RefineViolation carrying the untouched question.
Question refine_choices(const LlmClient& llm, const Question& q, const MainIdea& idea,
                        const std::vector<Passage>& passages, bool enabled = true);

}  // namespace quizgen
