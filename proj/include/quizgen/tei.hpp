#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "quizgen/ingest.hpp"

namespace quizgen {

/// Converts a GROBID TEI-XML response into a Document. Every body <div>
/// becomes a section (its <head> is the heading, its <p> children the text);
/// figures and tables are discarded. The title comes from the TEI header,
/// falling back to `fallback_title`.
/// Throws UnparseableDocument when the XML is invalid or has no body text.
Document parse_tei_document(std::string_view tei_xml, const std::string& fallback_title);

/// Client for a GROBID-compatible structure-extraction service.
class GrobidClient {
public:
    explicit GrobidClient(std::string endpoint, int timeout_seconds = 120);

    /// POSTs the PDF as multipart field "input" to /api/processFulltextDocument.
    /// Throws ServiceUnreachable on transport failure or non-200 status.
    std::string process_fulltext(const std::string& pdf_bytes, const std::string& filename) const;

    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::string endpoint_;
    int timeout_seconds_;
};

Document parse_structured_document(const std::string& pdf_bytes, const std::string& service_endpoint,
                                   const std::string& filename = "document.pdf");

}  // namespace quizgen
