#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quizgen/concepts.hpp"
#include "quizgen/generation.hpp"
#include "quizgen/ingest.hpp"
#include "quizgen/llm.hpp"
#include "quizgen/quiz_io.hpp"
#include "quizgen/retrieval.hpp"

namespace quizgen {

struct RunConfig {
    QuizRequest request;
    std::string model = "gpt-4o";
    std::size_t context_window_tokens = kDefaultContextWindow;
    std::size_t concurrency_cap = 8;
    ScoringMode retrieval_mode = ScoringMode::cosine;
    std::size_t chunk_target_tokens = 256;
    std::size_t chunk_overlap_tokens = 64;
    /// Extra generation rounds when dedupe leaves the savaal quiz short.
    int topup_rounds = 2;
    /// Stamped into the quiz; empty means the current time.
    std::string created_at;
};

struct RunResult {
    Quiz quiz;
    LedgerFile ledger;
    std::vector<MainIdea> ideas;     // ranked, savaal only
    std::optional<std::string> summary;  // summary method only
};

/// Runs the configured method over `doc`. All LLM traffic goes through `llm`
/// and is recorded in its ledger. Any failure surfaces as StageError naming
/// the stage that raised it.
RunResult run(const Document& doc, const RunConfig& cfg, const LlmClient& llm,
              std::shared_ptr<const Embedder> embedder);

/// Applies one generator, seeded with `seed`, to the questions in order.
std::vector<Question> shuffle_all(std::vector<Question> qs, std::uint64_t seed);

}  // namespace quizgen
