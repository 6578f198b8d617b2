#pragma once

#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "quizgen/generation.hpp"
#include "quizgen/judge.hpp"
#include "quizgen/llm.hpp"

namespace quizgen {

inline constexpr const char* kFileVersion = "1";

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string iso8601_utc(std::time_t t);

/// Stable key order, two-space indent, trailing newline.
std::string quiz_to_json(const Quiz& quiz);
/// Throws SchemaError describing the first offending field.
Quiz quiz_from_json(const std::string& json);

/// Hash of doc id, method, seed and question ids.
std::string quiz_id(const Quiz& quiz);

struct LedgerFile {
    std::string doc_id;
    Method method = Method::savaal;
    std::size_t n = 0;
    std::string model;
    std::size_t doc_tokens = 0;
    std::optional<std::size_t> summary_tokens;
    std::vector<TokenUsage> entries;
};

std::string ledger_to_json(const LedgerFile& ledger);
/// Throws SchemaError.
LedgerFile ledger_from_json(const std::string& json);

std::string scores_to_json(const std::vector<JudgeScore>& scores);

struct SessionAnswer {
    std::string question_id;
    int chosen_index = 0;
    bool correct = false;
};

struct SessionResult {
    std::string quiz_id;
    std::vector<SessionAnswer> answers;
    bool completed = false;

    /// correct / answered, 0 when nothing was answered.
    double score_fraction() const;
};

std::string session_to_json(const SessionResult& s);

/// Whole-file helpers. Reading throws Error when the file cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace quizgen
