#pragma once

#include <iosfwd>
#include <string>

#include "quizgen/ingest.hpp"

namespace quizgen {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `quizgen` tool with injectable streams.
/// Subcommands: generate, judge, cost (alias cost-report), quiz.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

/// Loads .pdf (through the TEI service at `grobid_url`), .xml/.tei, or plain
/// text/markdown from `path`.
Document load_document(const std::string& path, const std::string& grobid_url);

}  // namespace quizgen
