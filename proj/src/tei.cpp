#include "quizgen/tei.hpp"

#include <filesystem>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "http_util.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace pt = boost::property_tree;

namespace {

constexpr const char* kTextKey = "<xmltext>";
constexpr const char* kAttrKey = "<xmlattr>";

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    for (auto w : text::split_words(s)) {
        if (!out.empty()) out += ' ';
        out.append(w);
    }
    return out;
}

void gather_text(const pt::ptree& node, std::string& out) {
    for (const auto& [key, child] : node) {
        if (key == kTextKey) {
            out += child.data();
        } else if (key != kAttrKey) {
            gather_text(child, out);
        }
    }
}

std::string node_text(const pt::ptree& node) {
    std::string raw = node.data();
    gather_text(node, raw);
    return collapse_whitespace(raw);
}

void collect_divs(const pt::ptree& parent, std::vector<Section>& out) {
    for (const auto& [key, child] : parent) {
        if (key != "div") continue;
        Section s;
        std::vector<std::string> paragraphs;
        for (const auto& [ck, cc] : child) {
            if (ck == "head") {
                s.heading = node_text(cc);
            } else if (ck == "p") {
                auto p = node_text(cc);
                if (!p.empty()) paragraphs.push_back(std::move(p));
            }
        }
        s.text = text::join(paragraphs, "\n\n");
        if (!s.text.empty()) out.push_back(std::move(s));
        collect_divs(child, out);
    }
}

}  // namespace

Document parse_tei_document(std::string_view tei_xml, const std::string& fallback_title) {
    if (text::is_blank(tei_xml)) throw UnparseableDocument("service returned an empty response");

    pt::ptree tree;
    try {
        std::istringstream in{std::string(tei_xml)};
        pt::read_xml(in, tree, pt::xml_parser::no_concat_text);
    } catch (const pt::xml_parser_error& e) {
        throw UnparseableDocument(std::string("invalid TEI XML: ") + e.what());
    }

    auto root = tree.get_child_optional("TEI");
    if (!root) throw UnparseableDocument("response has no <TEI> root");

    std::string title;
    if (auto t = root->get_child_optional("teiHeader.fileDesc.titleStmt.title")) title = node_text(*t);
    if (title.empty()) title = fallback_title;

    std::vector<Section> sections;
    if (auto body = root->get_child_optional("text.body")) {
        std::vector<std::string> loose;
        for (const auto& [key, child] : *body) {
            if (key == "p") {
                auto p = node_text(child);
                if (!p.empty()) loose.push_back(std::move(p));
            }
        }
        if (!loose.empty()) sections.push_back(Section{0, "", text::join(loose, "\n\n"), 0});
        collect_divs(*body, sections);
    }
    if (sections.empty()) throw UnparseableDocument("service returned no body text");
    return make_document(std::move(title), std::move(sections));
}

GrobidClient::GrobidClient(std::string endpoint, int timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds) {}

std::string GrobidClient::process_fulltext(const std::string& pdf_bytes,
                                           const std::string& filename) const {
    const auto url = detail::split_url(endpoint_);
    auto cli = detail::make_client(url.origin, timeout_seconds_);

    httplib::MultipartFormDataItems items = {
        {"input", pdf_bytes, filename, "application/pdf"},
    };
    auto res = cli->Post(url.path + "/api/processFulltextDocument", items);
    if (!res) {
        throw ServiceUnreachable("structure service unreachable at " + endpoint_ + ": " +
                                 httplib::to_string(res.error()));
    }
    if (res->status == 204) throw UnparseableDocument("service found no content in the PDF");
    if (res->status != 200) {
        throw ServiceUnreachable("structure service returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

Document parse_structured_document(const std::string& pdf_bytes, const std::string& service_endpoint,
                                   const std::string& filename) {
    if (pdf_bytes.empty()) throw UnparseableDocument("empty PDF byte stream");
    GrobidClient client(service_endpoint);
    auto xml = client.process_fulltext(pdf_bytes, filename);
    return parse_tei_document(xml, std::filesystem::path(filename).stem().string());
}

}  // namespace quizgen
