#include "quizgen/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

// 1.33 tokens per word, kept integral so results never depend on float rounding.
constexpr std::size_t kTokensPerHundredWords = 133;

std::string passage_id(const std::string& doc_id, int section, std::size_t chunk) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ":%04d:%04zu", section, chunk);
    return doc_id + buf;
}

std::size_t max_words_within(std::size_t tokens) {
    return tokens * 100 / kTokensPerHundredWords;
}

}  // namespace

std::string Document::body_text() const {
    std::string out;
    for (const auto& s : sections) {
        if (!out.empty()) out += "\n\n";
        out += s.text;
    }
    return out;
}

std::size_t estimate_tokens_for_words(std::size_t words) {
    return (words * kTokensPerHundredWords + 99) / 100;
}

std::size_t estimate_tokens(std::string_view text) {
    return estimate_tokens_for_words(text::count_words(text));
}

Document make_document(std::string title, std::vector<Section> sections) {
    Document doc;
    doc.title = std::move(title);
    std::uint64_t h = text::fnv1a64(doc.title);
    for (std::size_t i = 0; i < sections.size(); ++i) {
        auto& s = sections[i];
        s.index = static_cast<int>(i);
        s.word_count = text::count_words(s.text);
        doc.word_count += s.word_count;
        h = text::fnv1a64(s.heading, text::fnv1a64("\x1f", h));
        h = text::fnv1a64(s.text, text::fnv1a64("\x1e", h));
    }
    doc.sections = std::move(sections);
    doc.id = "doc-" + text::hex64(h);
    return doc;
}

Document sectionize_plaintext(std::string_view input, std::string title) {
    if (text::is_blank(input)) throw EmptyDocument("document is empty");

    std::vector<Section> sections;
    std::string heading;
    std::vector<std::string> body;

    auto flush = [&] {
        auto joined = text::trim(text::join(body, "\n"));
        if (!joined.empty()) sections.push_back(Section{0, heading, std::move(joined), 0});
        body.clear();
    };

    for (auto& line : text::split_lines(input)) {
        if (!line.empty() && line.front() == '#') {
            flush();
            auto first = line.find_first_not_of('#');
            heading = first == std::string::npos ? std::string{} : text::trim(line.substr(first));
        } else {
            body.push_back(std::move(line));
        }
    }
    flush();

    if (sections.empty()) throw EmptyDocument("document has headings but no body text");
    return make_document(std::move(title), std::move(sections));
}

std::string render_markdown(const Document& doc) {
    std::string out;
    for (const auto& s : doc.sections) {
        if (!(s.heading.empty() && s.index == 0)) out += s.heading.empty() ? "#\n\n" : "# " + s.heading + "\n\n";
        out += s.text;
        out += "\n\n";
    }
    return out;
}

std::vector<std::size_t> window_starts(std::size_t total_tokens, std::size_t target_tokens,
                                       std::size_t overlap_tokens) {
    if (overlap_tokens >= target_tokens)
        throw InvalidChunkConfig("overlap must be smaller than target");
    const std::size_t stride = target_tokens - overlap_tokens;
    std::vector<std::size_t> starts;
    for (std::size_t s = 0;; s += stride) {
        starts.push_back(s);
        if (s + target_tokens >= total_tokens) break;
    }
    return starts;
}

std::vector<Passage> chunk_passages(const Document& doc, std::size_t target_tokens,
                                    std::size_t overlap_tokens) {
    if (overlap_tokens >= target_tokens)
        throw InvalidChunkConfig("overlap must be smaller than target");
    const std::size_t window = max_words_within(target_tokens);
    if (window == 0) throw InvalidChunkConfig("target too small to hold a single word");
    const std::size_t overlap = std::min(max_words_within(overlap_tokens), window - 1);
    const std::size_t stride = window - overlap;

    std::vector<Passage> out;
    for (const auto& section : doc.sections) {
        const std::string& t = section.text;
        auto words = text::split_words(t);
        const std::size_t n = words.size();
        if (n == 0) continue;

        std::vector<std::size_t> word_begin(n);
        for (std::size_t i = 0; i < n; ++i)
            word_begin[i] = static_cast<std::size_t>(words[i].data() - t.data());

        std::size_t chunk = 0;
        for (std::size_t s = 0;; s += stride) {
            const std::size_t e = std::min(s + window, n);
            Passage p;
            p.id = passage_id(doc.id, section.index, chunk++);
            p.doc_id = doc.id;
            p.section_index = section.index;
            p.char_begin = s == 0 ? 0 : word_begin[s];
            p.char_end = e == n ? t.size() : word_begin[e];
            p.text = t.substr(p.char_begin, p.char_end - p.char_begin);
            p.token_estimate = estimate_tokens_for_words(e - s);
            p.token_offset = estimate_tokens_for_words(s);
            out.push_back(std::move(p));
            if (e == n) break;
        }
    }
    return out;
}

Document load_plaintext_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sectionize_plaintext(ss.str(), std::filesystem::path(path).stem().string());
}

}  // namespace quizgen
