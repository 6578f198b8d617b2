#include "quizgen/generation.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "quizgen/parallel.hpp"
#include "quizgen/templates.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

constexpr std::string_view kSummaryMap = R"(Instructions:
Summarize the following section of a longer document. Keep every definition, claim, result and example a reader would need to answer detailed questions about it. Write plain prose without headings.

Section:
)";

constexpr std::string_view kSummaryReduce = R"(Instructions:
The following are summaries of consecutive sections of one document. Merge them into a single summary of the whole document, ordered as the document is, keeping the key concepts, their relationships and supporting details while removing repetition.

Section summaries:
)";

// Later direct turns point back at the document already in the conversation.
constexpr std::string_view kEarlierContext = "(the context provided earlier in this conversation)";

std::vector<Question> tag_questions(std::vector<Question> qs, Method method, std::string_view doc_id) {
    for (auto& q : qs) {
        q.method = method;
        q.id = question_id(doc_id, method, q.stem);
    }
    return qs;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::string to_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

void QuizRequest::validate() const {
    if (n < 1) throw std::invalid_argument("number of questions must be at least 1");
    if (batch_b < 1) throw std::invalid_argument("batch size must be at least 1");
    if (k < 1) throw std::invalid_argument("retrieval k must be at least 1");
}

std::vector<IdeaAllocation> allocate_questions(std::size_t n, const std::vector<MainIdea>& ideas) {
    std::vector<IdeaAllocation> out;
    const std::size_t m = ideas.size();
    if (m == 0) return out;
    out.reserve(m);
    const std::size_t base = n / m;
    const std::size_t extra = n % m;
    for (std::size_t i = 0; i < m; ++i) out.push_back({ideas[i], base + (i < extra ? 1 : 0)});
    return out;
}

std::string format_passages(const std::vector<Passage>& passages) {
    std::string out;
    for (std::size_t i = 0; i < passages.size(); ++i) {
        if (i) out += "\n\n";
        out += passages[i].text;
    }
    return out;
}

std::vector<Question> generate_for_idea(const LlmClient& llm, const MainIdea& idea,
                                        const std::vector<Passage>& passages, std::size_t n,
                                        std::string_view doc_id) {
    if (n == 0) throw std::invalid_argument("generate_for_idea: n must be at least 1");
    const auto prompt = render("savaal_generate", {{"num_questions", std::to_string(n)},
                                                   {"main_idea", idea.as_text()},
                                                   {"passages", format_passages(passages)}});
    std::vector<std::string> passage_ids;
    for (const auto& p : passages) passage_ids.push_back(p.id);

    std::string last_problem;
    for (int attempt = 0; attempt <= kParseReattempts; ++attempt) {
        const auto reply = llm.complete(llm.make_request(Stage::generate, prompt));
        try {
            auto qs = dedupe_questions(parse_mcq(reply.text));
            if (qs.size() >= n) {
                qs.resize(n);
                for (auto& q : qs) {
                    q.idea_title = idea.title;
                    q.passage_ids = passage_ids;
                }
                return tag_questions(std::move(qs), Method::savaal, doc_id);
            }
            last_problem = "got " + std::to_string(qs.size()) + " of " + std::to_string(n) + " questions";
        } catch (const ParseFailure& e) {
            last_problem = e.what();
        }
        spdlog::debug("generation for \"{}\" attempt {}: {}", idea.title, attempt + 1, last_problem);
    }
    throw ParseFailure("generation for \"" + idea.title + "\" failed after " + std::to_string(kParseReattempts) +
                       " re-attempts: " + last_problem);
}

std::vector<Question> generate_batched(const LlmClient& llm, const std::string& context, const QuizRequest& req,
                                       Method method, std::string_view doc_id) {
    req.validate();
    const std::size_t max_turns = ceil_div(req.n, req.batch_b) + 2;
    ChatRequest conv = llm.make_request(Stage::generate, {});
    conv.turns.clear();

    std::vector<Question> collected;
    for (std::size_t turn = 0; turn < max_turns && collected.size() < req.n; ++turn) {
        const auto ask = std::min(req.batch_b, req.n - collected.size());
        if (turn == 0) {
            conv.turns.push_back({"user", render("direct_generate", {{"num_questions", std::to_string(ask)},
                                                                     {"context", context}})});
        } else {
            conv.turns.push_back({"user", render("direct_additional", {{"num_questions", std::to_string(ask)},
                                                                       {"context", std::string(kEarlierContext)}})});
        }
        const auto reply = llm.complete(conv);
        conv.turns.push_back({"assistant", reply.text});
        try {
            auto batch = parse_mcq(reply.text);
            collected.insert(collected.end(), batch.begin(), batch.end());
            collected = dedupe_questions(collected);
        } catch (const ParseFailure& e) {
            spdlog::warn("turn {} produced no usable questions: {}", turn + 1, e.what());
        }
    }
    if (collected.size() < req.n)
        throw InsufficientQuestions("collected " + std::to_string(collected.size()) + " unique questions of " +
                                    std::to_string(req.n) + " after " + std::to_string(max_turns) + " turns");
    collected.resize(req.n);
    return tag_questions(std::move(collected), method, doc_id);
}

std::vector<Question> generate_direct(const LlmClient& llm, const Document& doc, const QuizRequest& req) {
    return generate_batched(llm, doc.body_text(), req, Method::direct, doc.id);
}

std::string summarize_map_reduce(const LlmClient& llm, const Document& doc) {
    const auto summaries = parallel_map(doc.sections.size(), llm.options().concurrency_cap, [&](std::size_t i) {
        return llm.complete(llm.make_request(Stage::map, std::string(kSummaryMap) + doc.sections[i].text)).text;
    });
    std::string joined;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (i) joined += "\n\n";
        joined += summaries[i];
    }
    return text::trim(llm.complete(llm.make_request(Stage::reduce, std::string(kSummaryReduce) + joined)).text);
}

std::vector<Question> generate_from_summary(const LlmClient& llm, const Document& doc, const QuizRequest& req) {
    return generate_from_summary(llm, doc, summarize_map_reduce(llm, doc), req);
}

std::vector<Question> generate_from_summary(const LlmClient& llm, const Document& doc, const std::string& summary,
                                            const QuizRequest& req) {
    return generate_batched(llm, summary, req, Method::summary, doc.id);
}

std::string single_prompt_text(const Document& doc, std::size_t n) {
    const auto& reg = TemplateRegistry::builtin();
    std::string out =
        "Think step by step. Carry out the five steps below in order, writing out the result of each step, "
        "and use the document at the end as the source for all of them.\n\n";
    out += "Step 1.\n" + reg.render("map", {{"context", "(each section of the document below)"}});
    out += "\n\nStep 2.\n" + reg.render("combine", {{"context", "(the concept maps from step 1)"}});
    out += "\n\nStep 3.\n" + reg.render("reduce", {{"context", "(the combined list from step 2)"}});
    out += "\n\nStep 4.\n" + reg.render("rank", {{"main_ideas", "(the main ideas from step 3)"}});
    out += "\n\nStep 5.\n" + reg.render("savaal_generate", {{"num_questions", std::to_string(n)},
                                                            {"main_idea", "(each ranked main idea from step 4)"},
                                                            {"passages", "(the parts of the document below that "
                                                                         "discuss that idea)"}});
    out += "\n\nSpread the " + std::to_string(n) +
           " questions over the ranked main ideas, most important first. After your reasoning write a line "
           "containing only \"" +
           std::string(kFinalBlockMarker) +
           "\", then the questions. Label the choices A., B., C. and D. and end each question with a line "
           "\"Correct Answer: X\".\n\nDocument:\n" +
           doc.body_text();
    return out;
}

std::vector<Question> generate_single_prompt(const LlmClient& llm, const Document& doc, const QuizRequest& req) {
    req.validate();
    const auto reply = llm.complete(llm.make_request(Stage::generate, single_prompt_text(doc, req.n))).text;
    std::string_view block = reply;
    const auto upper = to_upper(reply);
    if (auto pos = upper.rfind(kFinalBlockMarker); pos != std::string::npos)
        block = std::string_view(reply).substr(pos + kFinalBlockMarker.size());
    auto qs = dedupe_questions(parse_mcq(block));
    if (qs.size() < req.n)
        throw InsufficientQuestions("single prompt returned " + std::to_string(qs.size()) + " unique questions of " +
                                    std::to_string(req.n));
    qs.resize(req.n);
    return tag_questions(std::move(qs), Method::single_prompt, doc.id);
}

Question refine_choices(const LlmClient& llm, const Question& q, const MainIdea& idea,
                        const std::vector<Passage>& passages, bool enabled) {
    if (!enabled) return q;
    const std::string correct = std::string(1, choice_letter(q.correct_index)) + ". " + q.correct_text();
    const auto prompt = render("refine", {{"main_idea", idea.as_text()},
                                          {"passages", format_passages(passages)},
                                          {"question", q.stem},
                                          {"options", format_options(q)},
                                          {"correct_answer", correct}});
    const auto reply = llm.complete(llm.make_request(Stage::generate, prompt)).text;

    std::vector<Question> parsed;
    try {
        parsed = parse_mcq(reply);
    } catch (const ParseFailure& e) {
        throw RefineViolation(std::string("unreadable refine reply: ") + e.what(), q);
    }
    const Question& r = parsed.front();
    if (text::trim(r.correct_text()) != text::trim(q.correct_text()))
        throw RefineViolation("refine reply altered the correct choice", q);

    Question out = q;
    out.choices = r.choices;
    out.correct_index = r.correct_index;
    out.choices[static_cast<std::size_t>(out.correct_index)] = q.correct_text();
    std::string why;
    if (!is_valid(out, &why)) throw RefineViolation("refined question is invalid: " + why, q);
    return out;
}

}  // namespace quizgen
