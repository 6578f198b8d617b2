#include "quizgen/templates.hpp"

#include <algorithm>
#include <cctype>

#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

constexpr std::string_view kMap = R"(Instructions:
You are an expert educator specializing in creating detailed concept maps from academic texts. Given the following excerpt from a longer document, extract the main ideas, detailed concepts, and supporting details that are critical to understanding the material.

Focus on identifying:
- Key concepts or terms introduced in the text.
- Definitions or explanations of these concepts.
- Relationships between concepts.
- Any examples or applications mentioned.

Use clear, bullet-point summaries, organized by topic. Here is the excerpt:

Context:
{context}

Respond with a structured list of detailed main ideas and concepts.)";

constexpr std::string_view kCombine = R"(Instructions:
You are combining multiple concept maps into a single, comprehensive summary while retaining all key ideas and details. Below are several lists of main ideas and concepts extracted from a larger document.

Your task is to:
1. Merge these lists into a single structured list, removing redundancies while keeping all unique and detailed information.
2. Ensure all main ideas, relationships, and examples are preserved and clearly organized.

Here are the concept maps to combine:

Context:
{context}

Respond with the consolidated and organized list of main ideas and concepts.)";

constexpr std::string_view kReduce = R"(Instructions:
You are reducing sets of detailed concept maps, a concise yet comprehensive list of important concepts, generated by extracting concepts from a document and potentially combining subsets of them that are relevant to each other.
The goal is to create a structured resource that fully captures the essence of the material for testing and teaching purposes.

Your task is to:
- Identify the most critical concepts from the detailed concept map.
- Provide a full-sentence summary for each concept that explains its significance, its relationship to other concepts, and any relevant examples or applications.
- Ensure that the summaries are clear, self-contained, and detailed enough to aid in understanding without requiring additional context.
- If necessary, combine related concepts into a single summary. Some of the concept maps have broader headings that can be used to guide this process.

Here is the detailed concept map:

Context:
{context}

Respond with a structured list where each important concept is followed by its full-sentence, detailed summary. For example:
1. Concept Name: [Detailed full-sentence summary explaining the concept, its relevance, and any examples or applications.]
2. Another Concept: [Detailed full-sentence summary explaining this concept, its connections to other ideas, and its role in understanding the material.]

Continue in this format for all important concepts.)";

constexpr std::string_view kRank = R"(Instructions:
Given the following groups of main ideas extracted from a text, rank them in order of importance, with the most important main idea receiving a rank of 1 and lower ranks for less important ideas.
Focus on the most important aspects of the text and the main ideas that are critical to understanding the material. While sometimes important, background information or less critical ideas should be ranked lower.

When ranking:
- Assign a unique number to each main idea, starting from 1.
- Ensure that the most important main idea is ranked first.
- Rank the main ideas based on their relevance and significance.

Example:
    Input: [Main Idea 1, Main Idea 2, Main Idea 3]
    Output: [2, 1, 3]

Main Ideas:
{main_ideas})";

constexpr std::string_view kSavaalGenerate = R"(Instructions:
Based on the following main idea and its relevant passages, create {num_questions} multiple-choice questions that require deep understanding, critical thinking, and detailed analysis. The questions should go beyond mere factual recall, involving higher-order thinking skills like analysis, synthesis, and evaluation.
Do not use the phrases "main idea" or "passages" in the question statement. Instead, directly address the content or concepts described.
Provide four answer choices for each question:
- The choices should start with A., B., C., and D.
- One correct answer.
- Three plausible distractors that are contextually appropriate, relevant to the content, and reflect common misunderstandings or errors without introducing contradictory or irrelevant information.

Note: The questions should be focused on one concept and not very long, DO NOT ask multiple questions in one.

Main Idea:
{main_idea}

Passages:
{passages})";

constexpr std::string_view kDirectGenerate = R"(Instructions:
Based on the following context, create {num_questions} multiple-choice questions that require deep understanding, critical thinking, and detailed analysis.
The questions should go beyond mere factual recall, involving higher-order thinking skills like analysis, synthesis, and evaluation.

Provide four answer choices for each question:
- The choices should start with A., B., C., and D.
- One correct answer.
- Three plausible distractors that are:
    - Contextually appropriate.
    - Relevant to the content.
    - Reflect common misunderstandings or errors without introducing contradictory or irrelevant information.

Note: The questions should focus on one concept and not be overly long.
DO NOT ask multiple questions in one.

Context:
{context})";

constexpr std::string_view kDirectAdditional = R"(Instructions:
Now, please create {num_questions} additional multiple-choice questions that require deep understanding, critical thinking, and detailed analysis.
The questions should go beyond mere factual recall, involving higher-order thinking skills like analysis, synthesis, and evaluation.

Provide four answer choices for each question:
- The choices should start with A., B., C., and D.
- One correct answer.
- Three plausible distractors that are:
    - Contextually appropriate.
    - Relevant to the content.
    - Reflect common misunderstandings or errors without introducing contradictory or irrelevant information.

Note: The questions should focus on one concept and not be overly long.
Note: The questions should be different from the ones generated in the previous step.

Context:
{context})";

constexpr std::string_view kRefine = R"(Instructions:
You are given the following information about a multiple-choice question:

Main Idea: {main_idea}

Relevant Passages: {passages}

Question: {question}

Current Options: {options}

Correct Answer: {correct_answer}

Your task is to refine the three INCORRECT options in a way that:
- They remain closely related to the topic of the CORRECT option.
- They are incorrect but not obviously off-topic.
- They are PLAUSIBLE enough to confuse the reader.
- The correct option (and its label) must REMAIN UNCHANGED.
- The three incorrect options should ALIGN with the context of the correct answer; for example, if the question asks about advantages, a distractor that lists disadvantages would be considered bad.

Return the final question, the NEW options, and the correct answer.

REMEMBER:
The correct answer is: {correct_answer}.)";

constexpr std::string_view kJudgeHeader = R"(For the following multiple-choice question:
-----------
Question: {question}

Options: {options}

Answer: {answer}
-----------
Please answer the following:

Please carefully read the multiple-choice question, the options, and the correct answer.
)";

constexpr std::string_view kJudgeFooter = R"(
Please output only a score between 1 and 4.)";

constexpr std::string_view kUnderstanding = R"(Rate the understanding level of the question on a scale of 1 to 4 based on the following criteria:
- Score 4 if the question tests a deep understanding of a concept, requiring integration and application of ideas.
- Score 3 if the question tests understanding of a concept but is more straightforward, requiring less integration or application.
- Score 2 if the question largely depends on recall but includes some context-specific details that require a conceptual understanding.
- Score 1 if the question primarily tests memorization of facts or details with minimal to no application of concepts.
)";

constexpr std::string_view kChoices = R"(Rate the quality of choices in the question on a scale of 1 to 4 based on the following criteria:
- Score 4 if it is challenging to eliminate any incorrect choice due to well-crafted distractors that are plausible, unambiguous, and relevant to the question.
- Score 3 if incorrect choices can be somewhat challenging to eliminate, requiring a good understanding of the material, but they are less sophisticated.
- Score 2 if most incorrect choices are fairly easy to eliminate, with perhaps one plausible distractor.
- Score 1 if incorrect choices are very easy to eliminate, often due to being obviously incorrect or irrelevant.
)";

constexpr std::string_view kClarity = R"(Rate the clarity level of the question on a scale of 1 to 4 based on the following criteria:
- Score 4 if the question is completely clear and unambiguous.
- Score 3 if the question is mostly clear, but may have some ambiguity.
- Score 2 if the question has notable ambiguity that could confuse the reader.
- Score 1 if the question is highly confusing or unclear.
)";

constexpr std::string_view kDifficulty = R"(Rate the difficulty level of the question on a scale of 1 to 4 based on the following criteria:
- Score 4 if the question is very challenging, requiring deep understanding and advanced conceptual application.
- Score 3 if the question is moderately difficult, requiring understanding and some conceptual application.
- Score 2 if the question is relatively easy and mainly requires recall or basic understanding.
- Score 1 if the question is very easy and can be answered without specific knowledge.
)";

constexpr std::string_view kCognitive = R"(Rate the cognitive level of the question based on Bloom's taxonomy on a scale of 1 to 4 based on the following criteria:
- Score 4 if the question requires higher-level thinking (e.g., analysis, synthesis, or evaluation).
- Score 3 if the question requires application or understanding of concepts.
- Score 2 if the question requires basic understanding or recall.
- Score 1 if the question only tests rote memorization with minimal understanding.
)";

constexpr std::string_view kEngagement = R"(Rate the engagement level of the question on a scale from 1 to 4 based on the following criteria:
- Score 4 if the question is highly engaging and thought-provoking.
- Score 3 if the question is engaging but not particularly unique or thought-provoking.
- Score 2 if the question is somewhat engaging but fairly straightforward.
- Score 1 if the question is uninteresting or not engaging.
)";

// Authored in-house around the question "Would I use this question on a
// graduate-level quiz?"; there is no published rubric to transcribe.
constexpr std::string_view kUsability = R"(Rate the usability of the question on a graduate-level quiz on a scale of 1 to 4 based on the following criteria:
- Score 4 if you would use the question on a graduate-level quiz as written: it is correct, unambiguous, and has exactly one defensible answer.
- Score 3 if you would use the question after small changes to the wording or to one of the choices.
- Score 2 if the question needs substantial rework of the statement or several choices before it could be used.
- Score 1 if you would not use the question: it is incorrect, trivial, off-topic, or has more than one defensible answer.
)";

std::string judge_body(std::string_view rubric) {
    std::string body(kJudgeHeader);
    body += rubric;
    body += kJudgeFooter;
    return body;
}

bool is_name_char(char c) {
    return std::islower(static_cast<unsigned char>(c)) || c == '_' || std::isdigit(static_cast<unsigned char>(c));
}

}  // namespace

std::vector<std::string> placeholders(std::string_view body) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < body.size() && is_name_char(body[j])) ++j;
        if (j < body.size() && body[j] == '}' && j > i + 1) {
            std::string name(body.substr(i + 1, j - i - 1));
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
            i = j;
        }
    }
    return out;
}

std::string PromptTemplate::render(const TemplateVars& vars) const {
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() && is_name_char(body[j])) ++j;
            if (j < body.size() && body[j] == '}' && j > i + 1) {
                std::string name = body.substr(i + 1, j - i - 1);
                auto it = vars.find(name);
                if (it == vars.end()) throw MissingVariable(name);
                out += it->second;
                i = j;
                continue;
            }
        }
        out += body[i];
    }
    return out;
}

std::string PromptTemplate::instruction_head() const {
    auto brace = body.find('{');
    auto head = body.substr(0, brace);
    const std::string prefix = "Instructions:";
    if (head.rfind(prefix, 0) == 0) head = head.substr(prefix.size());
    return text::trim(head);
}

TemplateRegistry::TemplateRegistry() {
    auto add = [this](std::string name, std::string_view body) {
        PromptTemplate t;
        t.name = name;
        t.body = std::string(body);
        for (auto& v : placeholders(t.body)) t.required_vars.insert(v);
        templates_.emplace(std::move(name), std::move(t));
    };
    add("map", kMap);
    add("combine", kCombine);
    add("reduce", kReduce);
    add("rank", kRank);
    add("savaal_generate", kSavaalGenerate);
    add("direct_generate", kDirectGenerate);
    add("direct_additional", kDirectAdditional);
    add("refine", kRefine);
    add("judge_understanding", judge_body(kUnderstanding));
    add("judge_choices", judge_body(kChoices));
    add("judge_clarity", judge_body(kClarity));
    add("judge_difficulty", judge_body(kDifficulty));
    add("judge_cognitive", judge_body(kCognitive));
    add("judge_engagement", judge_body(kEngagement));
    add("judge_usability", judge_body(kUsability));
}

const TemplateRegistry& TemplateRegistry::builtin() {
    static const TemplateRegistry registry;
    return registry;
}

const PromptTemplate& TemplateRegistry::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw UnknownTemplate("unknown template: " + std::string(name));
    return it->second;
}

bool TemplateRegistry::contains(std::string_view name) const {
    return templates_.find(name) != templates_.end();
}

std::vector<std::string> TemplateRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : templates_) out.push_back(name);
    return out;
}

std::string render(std::string_view template_name, const TemplateVars& vars) {
    return TemplateRegistry::builtin().render(template_name, vars);
}

}  // namespace quizgen
