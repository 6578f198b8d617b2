#include "quizgen/judge.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "quizgen/errors.hpp"
#include "quizgen/parallel.hpp"
#include "quizgen/templates.hpp"

namespace quizgen {

namespace {

constexpr std::array<std::string_view, 4> kLabels{"Disagree", "Somewhat Disagree", "Somewhat Agree", "Agree"};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::understanding: return "understanding";
        case Metric::choices: return "choices";
        case Metric::clarity: return "clarity";
        case Metric::usability: return "usability";
        case Metric::difficulty: return "difficulty";
        case Metric::cognitive_level: return "cognitive_level";
        case Metric::engagement: return "engagement";
    }
    return "unknown";
}

Metric metric_from_string(std::string_view s) {
    for (auto m : kAllMetrics)
        if (to_string(m) == s) return m;
    if (s == "cognitive") return Metric::cognitive_level;
    throw Error("unknown metric: " + std::string(s));
}

std::string_view rubric_template(Metric m) {
    switch (m) {
        case Metric::understanding: return "judge_understanding";
        case Metric::choices: return "judge_choices";
        case Metric::clarity: return "judge_clarity";
        case Metric::usability: return "judge_usability";
        case Metric::difficulty: return "judge_difficulty";
        case Metric::cognitive_level: return "judge_cognitive";
        case Metric::engagement: return "judge_engagement";
    }
    throw Error("metric has no rubric");
}

std::string_view label_for(int score) {
    if (score < 1 || score > 4) throw OutOfRange("score " + std::to_string(score) + " is outside 1..4");
    return kLabels[static_cast<std::size_t>(score - 1)];
}

int score_for_label(std::string_view label) {
    for (std::size_t i = 0; i < kLabels.size(); ++i)
        if (kLabels[i] == label) return static_cast<int>(i) + 1;
    throw OutOfRange("unknown label: " + std::string(label));
}

int parse_score(std::string_view reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
        if (i > 0 && is_word_char(reply[i - 1])) {
            while (i < reply.size() && is_word_char(reply[i])) ++i;
            continue;
        }
        std::size_t j = i;
        while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
        if (j < reply.size() && std::isalpha(static_cast<unsigned char>(reply[j]))) {
            i = j;
            continue;  // "3rd", "4x"
        }
        const auto digits = std::string(reply.substr(i, j - i));
        const bool negative = i > 0 && reply[i - 1] == '-';
        const bool fractional = j + 1 < reply.size() && reply[j] == '.' &&
                                std::isdigit(static_cast<unsigned char>(reply[j + 1]));
        if (negative || fractional || digits.size() > 1)
            throw OutOfRange("score \"" + std::string(negative ? "-" : "") + digits + "\" is outside 1..4");
        const int v = digits[0] - '0';
        if (v < 1 || v > 4) throw OutOfRange("score " + digits + " is outside 1..4");
        return v;
    }
    throw ScoreParseFailure("no score in judge reply");
}

JudgeScore judge_question(const LlmClient& llm, const Question& q, Metric metric) {
    const auto answer = std::string(1, choice_letter(q.correct_index)) + ". " + q.correct_text();
    const auto prompt = render(rubric_template(metric), {{"question", q.stem},
                                                         {"options", format_options(q)},
                                                         {"answer", answer}});
    auto req = llm.make_request(Stage::judge, prompt);
    auto reply = llm.complete(req);
    int score = 0;
    try {
        score = parse_score(reply.text);
    } catch (const Error&) {
        req.turns.push_back({"assistant", reply.text});
        req.turns.push_back({"user", std::string(kScoreReask)});
        score = parse_score(llm.complete(req).text);
    }
    return {q.id, metric, score, std::string(label_for(score))};
}

std::vector<JudgeScore> judge_questions(const LlmClient& llm, const std::vector<Question>& qs,
                                        const std::vector<Metric>& metrics) {
    const std::size_t m = metrics.size();
    return parallel_map(qs.size() * m, llm.options().concurrency_cap,
                        [&](std::size_t i) { return judge_question(llm, qs[i / m], metrics[i % m]); });
}

double LabelDistribution::fraction(int score) const {
    if (total == 0) return 0.0;
    return static_cast<double>(counts.at(static_cast<std::size_t>(score - 1))) / static_cast<double>(total);
}

double LabelDistribution::negative_fraction() const { return fraction(1) + fraction(2); }

std::map<Metric, LabelDistribution> aggregate(const std::vector<JudgeScore>& scores) {
    std::map<Metric, LabelDistribution> out;
    for (const auto& s : scores) {
        label_for(s.score);  // range check
        auto& d = out[s.metric];
        ++d.counts[static_cast<std::size_t>(s.score - 1)];
        ++d.total;
    }
    return out;
}

double chi_square_sf3(double x) {
    if (x <= 0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0)) + std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
}

PositionAudit positional_bias_audit(const std::vector<int>& correct_indices) {
    PositionAudit a;
    for (int idx : correct_indices) {
        if (idx < 0 || idx > 3) throw OutOfRange("correct index " + std::to_string(idx) + " is outside 0..3");
        ++a.counts[static_cast<std::size_t>(idx)];
    }
    a.total = correct_indices.size();
    if (a.total == 0) return a;
    const double expected = static_cast<double>(a.total) / 4.0;
    for (std::size_t i = 0; i < 4; ++i) {
        a.fractions[i] = static_cast<double>(a.counts[i]) / static_cast<double>(a.total);
        const double diff = static_cast<double>(a.counts[i]) - expected;
        a.chi_square += diff * diff / expected;
    }
    a.p_value = chi_square_sf3(a.chi_square);
    return a;
}

PositionAudit positional_bias_audit(const std::vector<Question>& qs) {
    std::vector<int> idx;
    idx.reserve(qs.size());
    for (const auto& q : qs) idx.push_back(q.correct_index);
    return positional_bias_audit(idx);
}

}  // namespace quizgen
