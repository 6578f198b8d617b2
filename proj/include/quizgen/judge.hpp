#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "quizgen/llm.hpp"
#include "quizgen/mcq.hpp"

namespace quizgen {

enum class Metric { understanding, choices, clarity, usability, difficulty, cognitive_level, engagement };

inline constexpr std::array<Metric, 7> kAllMetrics{Metric::understanding, Metric::choices,    Metric::clarity,
                                                   Metric::usability,     Metric::difficulty, Metric::cognitive_level,
                                                   Metric::engagement};

std::string_view to_string(Metric m);
/// Throws Error for an unknown name.
Metric metric_from_string(std::string_view s);
/// Registry name of the metric's rubric.
std::string_view rubric_template(Metric m);

/// 4 Agree, 3 Somewhat Agree, 2 Somewhat Disagree, 1 Disagree. Throws OutOfRange otherwise.
std::string_view label_for(int score);
/// Inverse of label_for. Throws OutOfRange for an unknown label.
int score_for_label(std::string_view label);

struct JudgeScore {
    std::string question_id;
    Metric metric = Metric::understanding;
    int score = 0;
    std::string label;
};

/// First standalone integer in the reply. Throws ScoreParseFailure when there
/// is none and OutOfRange when it is not an integer in 1..4.
int parse_score(std::string_view reply);

inline constexpr std::string_view kScoreReask = "Please output only a score between 1 and 4.";

/// One rubric call; a malformed reply gets a single re-ask in the same conversation.
JudgeScore judge_question(const LlmClient& llm, const Question& q, Metric metric);

/// Every (question, metric) pair, concurrently under the client's cap, in
/// question-major order.
std::vector<JudgeScore> judge_questions(const LlmClient& llm, const std::vector<Question>& qs,
                                        const std::vector<Metric>& metrics);

struct LabelDistribution {
    std::array<std::size_t, 4> counts{};  // index = score - 1
    std::size_t total = 0;

    double fraction(int score) const;
    /// Disagree + Somewhat Disagree.
    double negative_fraction() const;
};

std::map<Metric, LabelDistribution> aggregate(const std::vector<JudgeScore>& scores);

struct PositionAudit {
    std::array<std::size_t, 4> counts{};
    std::size_t total = 0;
    std::array<double, 4> fractions{};
    double chi_square = 0.0;
    double p_value = 1.0;

    bool non_uniform(double alpha = 0.001) const { return total > 0 && p_value < alpha; }
};

/// Upper tail of the chi-square distribution with 3 degrees of freedom.
double chi_square_sf3(double x);

PositionAudit positional_bias_audit(const std::vector<int>& correct_indices);
PositionAudit positional_bias_audit(const std::vector<Question>& qs);

}  // namespace quizgen
