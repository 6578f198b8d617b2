#include "quizgen/mcq.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

std::string clean_line(std::string_view raw) {
    std::string s = text::trim(raw);
    // markdown emphasis and heading markers carry no content here
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '*' && i + 1 < s.size() && s[i + 1] == '*') {
            ++i;
            continue;
        }
        out += s[i];
    }
    s = text::trim(out);
    while (!s.empty() && s.front() == '#') s.erase(0, 1);
    s = text::trim(s);
    if (s.rfind("- ", 0) == 0 || s.rfind("* ", 0) == 0) s = text::trim(s.substr(2));
    if (s.rfind("\xE2\x80\xA2", 0) == 0) s = text::trim(s.substr(3));  // bullet
    return s;
}

struct Block {
    std::string stem;
    std::vector<std::pair<char, std::string>> choices;
    std::optional<char> answer;
};

Question finish(const Block& b) {
    if (b.choices.size() != 4)
        throw ParseFailure("question \"" + b.stem + "\" has " + std::to_string(b.choices.size()) + " choices");
    Question q;
    q.stem = text::trim(b.stem);
    for (std::size_t i = 0; i < 4; ++i) {
        if (b.choices[i].first != choice_letter(static_cast<int>(i)))
            throw ParseFailure("choices of \"" + q.stem + "\" are not labelled A-D in order");
        q.choices[i] = text::trim(b.choices[i].second);
    }
    const char a = *b.answer;
    if (a < 'A' || a > 'D') throw ParseFailure(std::string("unknown answer letter '") + a + "'");
    q.correct_index = a - 'A';
    std::string why;
    if (!is_valid(q, &why)) throw ParseFailure("invalid question \"" + q.stem + "\": " + why);
    return q;
}

std::vector<std::string> shingles(std::string_view stem) {
    std::vector<std::string> words;
    const auto normalized = normalize_stem(stem);
    for (auto w : text::split_words(normalized)) {
        std::string cleaned;
        for (char c : w)
            if (std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) cleaned += c;
        if (!cleaned.empty()) words.push_back(std::move(cleaned));
    }
    std::vector<std::string> out;
    if (words.size() < 3) {
        if (!words.empty()) out.push_back(text::join(words, " "));
        return out;
    }
    for (std::size_t i = 0; i + 3 <= words.size(); ++i)
        out.push_back(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    return out;
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::savaal: return "savaal";
        case Method::direct: return "direct";
        case Method::summary: return "summary";
        case Method::single_prompt: return "single_prompt";
    }
    return "unknown";
}

Method method_from_string(std::string_view s) {
    if (s == "savaal") return Method::savaal;
    if (s == "direct") return Method::direct;
    if (s == "summary") return Method::summary;
    if (s == "single_prompt" || s == "single-prompt") return Method::single_prompt;
    throw Error("unknown method: " + std::string(s));
}

bool is_valid(const Question& q, std::string* why) {
    auto fail = [&](const char* reason) {
        if (why) *why = reason;
        return false;
    };
    if (text::is_blank(q.stem)) return fail("empty stem");
    if (q.correct_index < 0 || q.correct_index > 3) return fail("correct index out of range");
    for (std::size_t i = 0; i < 4; ++i) {
        if (text::is_blank(q.choices[i])) return fail("empty choice");
        for (std::size_t j = 0; j < i; ++j)
            if (q.choices[i] == q.choices[j]) return fail("duplicate choices");
    }
    return true;
}

std::string format_options(const Question& q) {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i) out += '\n';
        out += choice_letter(i);
        out += ". ";
        out += q.choices[static_cast<std::size_t>(i)];
    }
    return out;
}

std::string format_mcq(const Question& q) {
    return q.stem + "\n" + format_options(q) + "\nCorrect Answer: " + choice_letter(q.correct_index) + ". " +
           q.correct_text();
}

std::vector<Question> parse_mcq(std::string_view input) {
    static const std::regex answer_re(R"(^(?:correct\s+answer|answer)\s*[:\-]?\s*\(?([A-Za-z])(?:[.):\s]|$).*)",
                                      std::regex::icase);
    static const std::regex choice_re(R"(^\(?([A-Za-z])[.)]\s+(.+)$)");
    static const std::regex number_re(R"(^(?:question\s*|q)?\d+\s*[.):]\s*(.*)$)", std::regex::icase);

    std::vector<Question> out;
    Block cur;
    for (const auto& raw : text::split_lines(input)) {
        const auto line = clean_line(raw);
        if (line.empty()) continue;
        std::smatch m;
        if (std::regex_match(line, m, answer_re)) {
            if (cur.choices.empty()) throw ParseFailure("answer line without choices: " + line);
            cur.answer = static_cast<char>(std::toupper(static_cast<unsigned char>(m[1].str()[0])));
            out.push_back(finish(cur));
            cur = Block{};
        } else if (!text::is_blank(cur.stem) && std::regex_match(line, m, choice_re)) {
            cur.choices.emplace_back(static_cast<char>(std::toupper(static_cast<unsigned char>(m[1].str()[0]))),
                                     m[2].str());
        } else {
            if (!cur.choices.empty()) throw ParseFailure("question \"" + cur.stem + "\" has no answer line");
            if (std::regex_match(line, m, number_re)) {
                cur.stem = m[1].str();
            } else {
                if (!cur.stem.empty()) cur.stem += ' ';
                cur.stem += line;
            }
        }
    }
    if (!cur.choices.empty()) throw ParseFailure("question \"" + cur.stem + "\" has no answer line");
    if (out.empty()) throw ParseFailure("no multiple-choice questions found");
    return out;
}

std::string question_id(std::string_view doc_id, Method method, std::string_view stem) {
    std::uint64_t h = text::fnv1a64(doc_id);
    h = text::fnv1a64(to_string(method), text::fnv1a64("\x1f", h));
    h = text::fnv1a64(stem, text::fnv1a64("\x1f", h));
    return "q-" + text::hex64(h);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % n;
    }
}

Question shuffle_choices(Question q, std::mt19937_64& rng) {
    std::array<int, 4> perm{0, 1, 2, 3};
    for (int i = 3; i > 0; --i) {
        const auto j = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::array<std::string, 4> shuffled;
    int new_correct = 0;
    for (std::size_t pos = 0; pos < 4; ++pos) {
        shuffled[pos] = std::move(q.choices[static_cast<std::size_t>(perm[pos])]);
        if (perm[pos] == q.correct_index) new_correct = static_cast<int>(pos);
    }
    q.choices = std::move(shuffled);
    q.correct_index = new_correct;
    return q;
}

std::string normalize_stem(std::string_view stem) {
    std::string out;
    for (auto w : text::split_words(stem)) {
        if (!out.empty()) out += ' ';
        out += text::to_lower(w);
    }
    return out;
}

double shingle_jaccard(std::string_view a, std::string_view b) {
    auto va = shingles(a);
    auto vb = shingles(b);
    std::set<std::string> sa(va.begin(), va.end());
    std::set<std::string> sb(vb.begin(), vb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& s : sa) inter += sb.count(s);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

bool is_duplicate(const Question& a, const Question& b) {
    if (normalize_stem(a.stem) == normalize_stem(b.stem)) return true;
    return shingle_jaccard(a.stem, b.stem) >= kDuplicateJaccard;
}

std::vector<Question> dedupe_questions(const std::vector<Question>& qs) {
    std::vector<Question> kept;
    for (const auto& q : qs) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Question& k) { return is_duplicate(k, q); });
        if (!dup) kept.push_back(q);
    }
    return kept;
}

}  // namespace quizgen
