#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace quizgen {

struct Section {
    int index = 0;
    std::string heading;  // may be empty
    std::string text;
    std::size_t word_count = 0;
};

struct Document {
    std::string id;
    std::string title;
    std::vector<Section> sections;
    std::size_t word_count = 0;

    /// Section texts joined by blank lines, headings omitted.
    std::string body_text() const;
};

/// A retrieval unit: a contiguous slice [char_begin, char_end) of one section.
struct Passage {
    std::string id;
    std::string doc_id;
    int section_index = 0;
    std::string text;
    std::size_t token_estimate = 0;
    std::size_t token_offset = 0;  // estimated tokens preceding the slice in its section
    std::size_t char_begin = 0;
    std::size_t char_end = 0;
};

/// Words-to-tokens heuristic: ceil(words * 1.33), computed in integer arithmetic.
std::size_t estimate_tokens(std::string_view text);
std::size_t estimate_tokens_for_words(std::size_t words);

/// Builds a Document from sections, assigning indices, word counts and a content-derived id.
Document make_document(std::string title, std::vector<Section> sections);

/// Splits on lines beginning with '#'. Text before the first heading becomes an
/// untitled section; headings with no body are dropped.
/// Throws EmptyDocument when `text` is blank.
Document sectionize_plaintext(std::string_view text, std::string title);

/// Inverse of sectionize_plaintext on its own output.
std::string render_markdown(const Document& doc);

/// Token offsets at which sliding windows start for a span of `total_tokens`.
/// The last window is the first one reaching the end of the span.
std::vector<std::size_t> window_starts(std::size_t total_tokens, std::size_t target_tokens,
                                       std::size_t overlap_tokens);

/// Sliding-window chunking per section with stride target - overlap.
/// Windows are cut on word boundaries, so every passage estimates to at most
/// `target_tokens`. Throws InvalidChunkConfig unless target > overlap.
std::vector<Passage> chunk_passages(const Document& doc, std::size_t target_tokens = 256,
                                    std::size_t overlap_tokens = 64);

/// Reads a UTF-8 text/markdown file and sectionizes it. Title defaults to the file stem.
Document load_plaintext_file(const std::string& path);

}  // namespace quizgen
