#include "quizgen/concepts.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "quizgen/errors.hpp"
#include "quizgen/parallel.hpp"
#include "quizgen/templates.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

constexpr std::size_t kMaxTitleWords = 15;

std::string join_notes(const std::vector<std::string>& notes) {
    if (notes.size() == 1) return notes.front();
    std::string out;
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i) out += "\n\n";
        out += "Concept map " + std::to_string(i + 1) + ":\n" + notes[i];
    }
    return out;
}

std::string strip_bold(std::string s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
            ++i;
            continue;
        }
        out += s[i];
    }
    return text::trim(out);
}

std::string strip_brackets(std::string s) {
    s = text::trim(s);
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    return text::trim(s);
}

}  // namespace

std::string map_extract(const LlmClient& llm, const Section& section) {
    if (text::is_blank(section.text)) throw std::invalid_argument("map_extract: section text is blank");
    auto prompt = render("map", {{"context", section.text}});
    return llm.complete(llm.make_request(Stage::map, std::move(prompt))).text;
}

std::vector<std::string> map_sections(const LlmClient& llm, const Document& doc) {
    return parallel_map(doc.sections.size(), llm.options().concurrency_cap,
                        [&](std::size_t i) { return map_extract(llm, doc.sections[i]); });
}

std::vector<std::vector<std::string>> group_notes(const std::vector<std::string>& notes,
                                                  std::size_t window_tokens) {
    const std::size_t overhead = estimate_tokens(render("combine", {{"context", ""}}));
    std::vector<std::vector<std::string>> groups;
    std::vector<std::string> current;
    for (const auto& note : notes) {
        if (!current.empty()) {
            auto trial = current;
            trial.push_back(note);
            if (overhead + estimate_tokens(join_notes(trial)) > window_tokens) {
                groups.push_back(std::move(current));
                current.clear();
            }
        }
        current.push_back(note);
    }
    if (!current.empty()) groups.push_back(std::move(current));
    return groups;
}

std::string combine(const LlmClient& llm, const std::vector<std::string>& notes, std::size_t window_tokens) {
    if (notes.empty()) throw std::invalid_argument("combine: no notes");

    auto groups = group_notes(notes, window_tokens);
    // A pass that cannot merge anything would loop forever; send it all at once.
    if (groups.size() > 1 && groups.size() == notes.size()) groups = {notes};

    std::vector<std::string> merged;
    merged.reserve(groups.size());
    for (const auto& g : groups) {
        auto prompt = render("combine", {{"context", join_notes(g)}});
        merged.push_back(llm.complete(llm.make_request(Stage::combine, std::move(prompt))).text);
    }
    if (merged.size() == 1) return merged.front();
    return combine(llm, merged, window_tokens);
}

std::vector<MainIdea> parse_idea_list(std::string_view input, const std::string& source_doc) {
    static const std::regex numbered(R"(^\s*\(?\d+[.)]\s+(.+)$)");
    static const std::regex bullet(R"(^\s*(?:[-*]|•)\s+(.+)$)");

    std::vector<MainIdea> ideas;
    std::set<std::string> seen;
    for (const auto& line : text::split_lines(input)) {
        std::smatch m;
        std::string body;
        bool is_numbered = false;
        if (std::regex_match(line, m, numbered)) {
            body = m[1].str();
            is_numbered = true;
        } else if (std::regex_match(line, m, bullet)) {
            body = m[1].str();
        } else {
            body = text::trim(line);
        }

        const bool bold_title = body.rfind("**", 0) == 0;
        auto cleaned = strip_bold(body);
        auto colon = cleaned.find(':');
        if (colon == std::string::npos) continue;

        auto title = text::trim(cleaned.substr(0, colon));
        auto raw_desc = text::trim(cleaned.substr(colon + 1));
        const bool bracketed = raw_desc.size() >= 2 && raw_desc.front() == '[' && raw_desc.back() == ']';
        if (!is_numbered && !bracketed && !bold_title) continue;

        auto desc = strip_brackets(raw_desc);
        if (title.empty() || desc.empty() || text::count_words(title) > kMaxTitleWords) continue;

        auto key = text::to_lower(title);
        if (!seen.insert(key).second) continue;
        MainIdea idea;
        idea.title = std::move(title);
        idea.description = std::move(desc);
        idea.rank = static_cast<int>(ideas.size()) + 1;
        idea.source_doc = source_doc;
        ideas.push_back(std::move(idea));
    }
    if (ideas.empty()) throw ParseFailure("no recognizable concept list in reduce output");
    return ideas;
}

std::vector<MainIdea> reduce_ideas(const LlmClient& llm, const std::string& combined,
                                   std::size_t window_tokens, const std::string& source_doc) {
    if (text::is_blank(combined)) throw std::invalid_argument("reduce_ideas: combined notes are blank");
    std::string current = combined;
    for (int round = 0; round < kMaxReduceRounds && estimate_tokens(current) > window_tokens; ++round) {
        auto prompt = render("reduce", {{"context", current}});
        current = llm.complete(llm.make_request(Stage::reduce, std::move(prompt))).text;
    }
    return parse_idea_list(current, source_doc);
}

std::optional<std::vector<int>> parse_rank_permutation(std::string_view reply, std::size_t m) {
    std::string_view body = reply;
    auto open = reply.find('[');
    if (open != std::string_view::npos) {
        auto close = reply.find(']', open);
        if (close == std::string_view::npos) return std::nullopt;
        body = reply.substr(open + 1, close - open - 1);
    }

    std::vector<int> values;
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        long v = 0;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
            v = v * 10 + (body[i] - '0');
            if (v > 1'000'000) return std::nullopt;
            ++i;
        }
        values.push_back(static_cast<int>(v));
    }

    if (values.size() != m) return std::nullopt;
    std::vector<bool> hit(m + 1, false);
    for (int v : values) {
        if (v < 1 || static_cast<std::size_t>(v) > m || hit[static_cast<std::size_t>(v)]) return std::nullopt;
        hit[static_cast<std::size_t>(v)] = true;
    }
    return values;
}

RankOutcome rank_ideas_detailed(const LlmClient& llm, std::vector<MainIdea> ideas) {
    if (ideas.empty()) throw std::invalid_argument("rank_ideas: no ideas");
    RankOutcome out;
    if (ideas.size() == 1) {
        ideas.front().rank = 1;
        out.ideas = std::move(ideas);
        return out;
    }

    std::string listing;
    for (std::size_t i = 0; i < ideas.size(); ++i)
        listing += std::to_string(i + 1) + ". " + ideas[i].as_text() + "\n";
    auto reply = llm.complete(llm.make_request(Stage::rank, render("rank", {{"main_ideas", listing}}))).text;

    if (auto ranks = parse_rank_permutation(reply, ideas.size())) {
        std::vector<MainIdea> ordered(ideas.size());
        for (std::size_t i = 0; i < ideas.size(); ++i) {
            const auto r = static_cast<std::size_t>((*ranks)[i]);
            ideas[i].rank = static_cast<int>(r);
            ordered[r - 1] = std::move(ideas[i]);
        }
        out.ideas = std::move(ordered);
        return out;
    }

    out.fell_back = true;
    out.warning = "rank reply is not a permutation of 1.." + std::to_string(ideas.size()) +
                  "; keeping listed order";
    spdlog::warn("{}", out.warning);
    for (std::size_t i = 0; i < ideas.size(); ++i) ideas[i].rank = static_cast<int>(i) + 1;
    out.ideas = std::move(ideas);
    return out;
}

std::vector<MainIdea> rank_ideas(const LlmClient& llm, std::vector<MainIdea> ideas) {
    return rank_ideas_detailed(llm, std::move(ideas)).ideas;
}

}  // namespace quizgen
