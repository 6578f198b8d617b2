#include "quizgen/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "quizgen/cost.hpp"
#include "quizgen/embedders.hpp"
#include "quizgen/errors.hpp"
#include "quizgen/judge.hpp"
#include "quizgen/mock_backend.hpp"
#include "quizgen/openai_backend.hpp"
#include "quizgen/pipeline.hpp"
#include "quizgen/quiz_io.hpp"
#include "quizgen/tei.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace fs = std::filesystem;

namespace {

// Resolved in order: defaults, config file, environment, flags.
struct Settings {
    std::string model = "gpt-4o";
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string grobid_url = "http://localhost:8070";
    std::size_t concurrency = 8;
    std::size_t context_window = kDefaultContextWindow;
    std::string retrieval = "cosine";
    std::string embedder = "hash";
    std::size_t embedding_dim = 64;
    std::string embedding_model = "text-embedding-3-small";
};

void apply_config_file(Settings& s, const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("config file " + path + " is not valid JSON: " + e.what());
    }
    auto str = [&](const char* key, std::string& dst) {
        if (j.contains(key)) dst = j[key].get<std::string>();
    };
    auto num = [&](const char* key, std::size_t& dst) {
        if (j.contains(key)) dst = j[key].get<std::size_t>();
    };
    try {
        str("model", s.model);
        str("base_url", s.base_url);
        str("api_key", s.api_key);
        str("grobid_url", s.grobid_url);
        num("concurrency", s.concurrency);
        num("context_window", s.context_window);
        str("retrieval", s.retrieval);
        str("embedder", s.embedder);
        num("embedding_dim", s.embedding_dim);
        str("embedding_model", s.embedding_model);
    } catch (const nlohmann::json::exception& e) {
        throw Error("config file " + path + ": " + e.what());
    }
}

void apply_env(Settings& s) {
    if (const char* v = std::getenv("LLM_API_KEY"); v && *v) s.api_key = v;
    if (const char* v = std::getenv("LLM_BASE_URL"); v && *v) s.base_url = v;
    if (const char* v = std::getenv("GROBID_URL"); v && *v) s.grobid_url = v;
}

// Flags shared by the commands that talk to a model.
struct ModelFlags {
    std::string config;
    std::string mock;
    Settings flag;
    CLI::Option* model = nullptr;
    CLI::Option* base_url = nullptr;
    CLI::Option* grobid_url = nullptr;
    CLI::Option* concurrency = nullptr;
    CLI::Option* context_window = nullptr;
    CLI::Option* retrieval = nullptr;
    CLI::Option* embedder = nullptr;
    CLI::Option* embedding_dim = nullptr;

    void add_to(CLI::App* cmd, bool generation) {
        cmd->add_option("--config", config, "JSON settings file")->check(CLI::ExistingFile);
        cmd->add_option("--mock", mock, "Scripted replies instead of a live model")->check(CLI::ExistingFile);
        model = cmd->add_option("--model", flag.model, "Model name");
        base_url = cmd->add_option("--base-url", flag.base_url, "OpenAI-compatible endpoint");
        concurrency = cmd->add_option("--concurrency", flag.concurrency, "Maximum in-flight requests")
                          ->check(CLI::PositiveNumber);
        if (!generation) return;
        grobid_url = cmd->add_option("--grobid-url", flag.grobid_url, "TEI extraction service for PDF input");
        context_window = cmd->add_option("--context-window", flag.context_window, "Model context window in tokens")
                             ->check(CLI::PositiveNumber);
        retrieval = cmd->add_option("--retrieval", flag.retrieval, "Passage scoring")
                        ->check(CLI::IsMember({"cosine", "late_interaction", "late"}));
        embedder = cmd->add_option("--embedder", flag.embedder, "Embedding source")
                       ->check(CLI::IsMember({"hash", "http"}));
        embedding_dim = cmd->add_option("--embedding-dim", flag.embedding_dim, "Embedding dimension")
                            ->check(CLI::PositiveNumber);
    }

    Settings resolve() const {
        Settings s;
        if (!config.empty()) apply_config_file(s, config);
        apply_env(s);
        auto set = [](CLI::Option* o) { return o && o->count() > 0; };
        if (set(model)) s.model = flag.model;
        if (set(base_url)) s.base_url = flag.base_url;
        if (set(grobid_url)) s.grobid_url = flag.grobid_url;
        if (set(concurrency)) s.concurrency = flag.concurrency;
        if (set(context_window)) s.context_window = flag.context_window;
        if (set(retrieval)) s.retrieval = flag.retrieval;
        if (set(embedder)) s.embedder = flag.embedder;
        if (set(embedding_dim)) s.embedding_dim = flag.embedding_dim;
        return s;
    }

    LlmClient make_client(const Settings& s) const {
        std::shared_ptr<ChatBackend> backend;
        if (!mock.empty()) {
            backend = ScriptedBackend::from_file(mock);
        } else {
            OpenAiConfig oc;
            oc.base_url = s.base_url;
            oc.api_key = s.api_key;
            backend = std::make_shared<OpenAiBackend>(oc);
        }
        ClientOptions opts;
        opts.model = s.model;
        opts.concurrency_cap = s.concurrency;
        return LlmClient(std::move(backend), opts);
    }
};

std::shared_ptr<const Embedder> make_embedder(const Settings& s) {
    if (s.embedder == "http") {
        HttpEmbedderConfig hc;
        hc.base_url = s.base_url;
        hc.api_key = s.api_key;
        hc.model = s.embedding_model;
        hc.dimension = s.embedding_dim;
        return std::make_shared<HttpEmbedder>(hc);
    }
    return std::make_shared<HashEmbedder>(s.embedding_dim);
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    fs::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::string resolve_created_at(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* v = std::getenv("SOURCE_DATE_EPOCH"); v && *v) {
        try {
            return iso8601_utc(static_cast<std::time_t>(std::stoll(v)));
        } catch (const std::exception&) {
            throw Error(std::string("SOURCE_DATE_EPOCH is not an integer: ") + v);
        }
    }
    return {};
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string percent(double f) { return fmt("%.1f%%", 100.0 * f); }

Document in_stage_load(const std::string& path, const std::string& grobid_url) {
    try {
        return load_document(path, grobid_url);
    } catch (const std::exception& e) {
        throw StageError("ingest", e.what());
    }
}

// ---- generate ------------------------------------------------------------

struct GenerateFlags {
    std::string input;
    std::string method = "savaal";
    std::size_t n = 20;
    std::uint64_t seed = 0;
    std::size_t k = 3;
    std::size_t batch = 20;
    bool refine = false;
    std::string out = "quiz.json";
    std::string ledger_out;
    std::string created_at;
    ModelFlags model;
};

int cmd_generate(const GenerateFlags& f, std::ostream& out) {
    const auto settings = f.model.resolve();
    const auto doc = in_stage_load(f.input, settings.grobid_url);

    RunConfig cfg;
    cfg.request.n = f.n;
    cfg.request.method = method_from_string(f.method);
    cfg.request.k = f.k;
    cfg.request.batch_b = f.batch;
    cfg.request.seed = f.seed;
    cfg.request.refine = f.refine;
    cfg.model = settings.model;
    cfg.context_window_tokens = settings.context_window;
    cfg.concurrency_cap = settings.concurrency;
    cfg.retrieval_mode = scoring_mode_from_string(settings.retrieval);
    cfg.created_at = resolve_created_at(f.created_at);

    const auto llm = f.model.make_client(settings);
    const auto result = run(doc, cfg, llm, make_embedder(settings));

    const auto ledger_path = f.ledger_out.empty() ? sibling_path(f.out, ".ledger.json") : f.ledger_out;
    write_text_file(f.out, quiz_to_json(result.quiz));
    write_text_file(ledger_path, ledger_to_json(result.ledger));

    const auto& u = result.quiz.usage_totals;
    out << "quiz: " << f.out << " (" << result.quiz.questions.size() << " questions, method "
        << to_string(result.quiz.method) << ", model " << result.quiz.model << ")\n";
    out << "ledger: " << ledger_path << " (" << result.ledger.entries.size() << " calls)\n";
    out << "tokens: prompt " << u.prompt_tokens << ", completion " << u.completion_tokens << ", cached "
        << u.cached_prompt_tokens << "\n";
    return kExitOk;
}

// ---- judge ---------------------------------------------------------------

struct JudgeFlags {
    std::string quiz;
    std::vector<std::string> metrics;
    std::string out;
    ModelFlags model;
};

void print_distribution_table(const std::map<Metric, LabelDistribution>& agg, std::ostream& out) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %5s %8s %15s %18s %9s %9s\n", "metric", "n", "Agree", "Somewhat Agree",
                  "Somewhat Disagree", "Disagree", "negative");
    out << line;
    for (auto m : kAllMetrics) {
        auto it = agg.find(m);
        if (it == agg.end()) continue;
        const auto& d = it->second;
        std::snprintf(line, sizeof line, "%-16s %5zu %8s %15s %18s %9s %9s\n", std::string(to_string(m)).c_str(),
                      d.total, percent(d.fraction(4)).c_str(), percent(d.fraction(3)).c_str(),
                      percent(d.fraction(2)).c_str(), percent(d.fraction(1)).c_str(),
                      percent(d.negative_fraction()).c_str());
        out << line;
    }
}

int cmd_judge(const JudgeFlags& f, std::ostream& out) {
    const auto quiz = quiz_from_json(read_text_file(f.quiz));
    std::vector<Metric> metrics;
    if (f.metrics.empty()) {
        metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
    } else {
        for (const auto& m : f.metrics) metrics.push_back(metric_from_string(m));
    }
    const auto settings = f.model.resolve();
    const auto llm = f.model.make_client(settings);
    std::vector<JudgeScore> scores;
    try {
        scores = judge_questions(llm, quiz.questions, metrics);
    } catch (const std::exception& e) {
        throw StageError("judge", e.what());
    }
    const auto path = f.out.empty() ? sibling_path(f.quiz, ".scores.json") : f.out;
    write_text_file(path, scores_to_json(scores));
    print_distribution_table(aggregate(scores), out);
    out << "scores: " << path << "\n";
    return kExitOk;
}

// ---- cost ----------------------------------------------------------------

struct CostFlags {
    std::string prices;
    std::string preset;
    double doc_tokens = 35000;
    double summary_tokens = 0;
    double b = 20;
    double b_s = 20;
    double q_out = 100;
    double f_ratio = 1.48;
    std::optional<double> cache_discount;
    std::size_t n_min = 10;
    std::size_t n_max = 200;
    std::size_t n_step = 10;
    std::optional<double> parity_at;
    std::string ledger;
    CLI::Option* doc_tokens_opt = nullptr;
    CLI::Option* summary_tokens_opt = nullptr;
};

int cmd_cost(const CostFlags& f, std::ostream& out) {
    const auto preset = load_price_preset(f.prices.empty() ? default_prices_path() : f.prices, f.preset);
    CostParams p;
    p.A = preset.input_per_token;
    p.B = preset.output_per_token;
    p.cache_discount = f.cache_discount.value_or(preset.cache_discount);
    p.b = f.b;
    p.b_s = f.b_s;
    p.q_out = f.q_out;
    p.f_ratio = f.f_ratio;
    p.validate();

    std::optional<LedgerFile> ledger;
    if (!f.ledger.empty()) ledger = ledger_from_json(read_text_file(f.ledger));

    double d = f.doc_tokens;
    if (ledger && f.doc_tokens_opt->count() == 0) d = static_cast<double>(ledger->doc_tokens);
    double d_s = d / 10.0;
    if (f.summary_tokens_opt->count() > 0) {
        d_s = f.summary_tokens;
    } else if (ledger && ledger->summary_tokens) {
        d_s = static_cast<double>(*ledger->summary_tokens);
    }

    std::vector<std::size_t> ns;
    for (std::size_t n = f.n_min; n <= f.n_max; n += f.n_step) ns.push_back(n);
    if (ledger && std::find(ns.begin(), ns.end(), ledger->n) == ns.end()) {
        ns.push_back(ledger->n);
        std::sort(ns.begin(), ns.end());
    }

    std::optional<Reconciliation> actual;
    if (ledger) actual = reconcile(ledger->entries, p);
    const std::string ledger_method = ledger ? std::string(to_string(ledger->method)) : std::string();

    out << "method,N,modeled_cost,actual_cost\n";
    auto row = [&](const std::string& method, std::size_t n, std::optional<double> modeled) {
        out << method << ',' << n << ',' << (modeled ? fmt("%.6f", *modeled) : std::string()) << ',';
        if (actual && ledger->n == n && ledger_method == method) out << fmt("%.6f", actual->actual_cost);
        out << '\n';
    };
    for (auto n : ns) {
        const auto nd = static_cast<double>(n);
        row("direct", n, cost_direct_money(nd, d, p, false));
        row("direct_cached", n, cost_direct_money(nd, d, p, true));
        row("savaal", n, cost_savaal_money(nd, d, p));
        row("summary", n, cost_summary_money(nd, d, d_s, p));
        if (ledger && ledger->method == Method::single_prompt && ledger->n == n) row("single_prompt", n, std::nullopt);
    }

    out << "# prices: " << preset.name << " (input " << fmt("%g", p.A) << ", output " << fmt("%g", p.B)
        << ", cached input x" << fmt("%g", p.cache_discount) << ")\n";
    out << "# crossover uncached: N*=" << fmt("%.10g", crossover_n(p, false)) << " (b=" << fmt("%g", p.b)
        << ", f_ratio=" << fmt("%g", p.f_ratio) << ")\n";
    try {
        out << "# crossover cached: N*=" << fmt("%.10g", crossover_n(p, true)) << " (b=" << fmt("%g", p.b)
            << ", cache_discount=" << fmt("%g", p.cache_discount) << ")\n";
    } catch (const NoCrossover& e) {
        out << "# crossover cached: none (" << e.what() << ")\n";
    }
    if (f.parity_at) {
        const double b = parity_batch_size(*f.parity_at, p);
        out << "# parity at N=" << fmt("%g", *f.parity_at) << ": b\xE2\x89\x88" << fmt("%.0f", std::floor(b))
            << " (N/f_ratio=" << fmt("%.2f", b) << ")\n";
    }
    if (actual) {
        out << "# ledger: method " << ledger_method << ", N=" << ledger->n << ", D=" << ledger->doc_tokens
            << " tokens, actual_cost=" << fmt("%.6f", actual->actual_cost) << "\n";
        out << "# actual by stage:";
        for (const auto& [stage, cost] : actual->by_stage) out << ' ' << stage << '=' << fmt("%.6f", cost);
        out << "\n";
    }
    return kExitOk;
}

// ---- quiz ----------------------------------------------------------------

struct QuizFlags {
    std::string quiz;
    bool shuffle_questions = false;
    std::uint64_t seed = 0;
    std::string result_out;
};

int cmd_quiz(const QuizFlags& f, std::istream& in, std::ostream& out) {
    const auto quiz = quiz_from_json(read_text_file(f.quiz));
    std::vector<std::size_t> order(quiz.questions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (f.shuffle_questions) {
        std::mt19937_64 rng(f.seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
    }

    SessionResult session;
    session.quiz_id = quiz_id(quiz);
    bool eof = false;
    for (std::size_t pos = 0; pos < order.size() && !eof; ++pos) {
        const auto& q = quiz.questions[order[pos]];
        out << "\nQuestion " << pos + 1 << "/" << order.size() << ": " << q.stem << "\n";
        for (int c = 0; c < 4; ++c) out << "  " << choice_letter(c) << ". " << q.choices[static_cast<std::size_t>(c)] << "\n";
        for (;;) {
            out << "Your answer (A-D): " << std::flush;
            std::string line;
            if (!std::getline(in, line)) {
                eof = true;
                out << "\n";
                break;
            }
            const auto t = text::trim(line);
            if (t.size() != 1 || std::toupper(static_cast<unsigned char>(t[0])) < 'A' ||
                std::toupper(static_cast<unsigned char>(t[0])) > 'D') {
                out << "Please enter A, B, C or D.\n";
                continue;
            }
            const int chosen = std::toupper(static_cast<unsigned char>(t[0])) - 'A';
            const bool correct = chosen == q.correct_index;
            session.answers.push_back({q.id, chosen, correct});
            if (correct) {
                out << "Correct.\n";
            } else {
                out << "Incorrect. The answer is " << choice_letter(q.correct_index) << ". " << q.correct_text()
                    << "\n";
            }
            break;
        }
    }
    session.completed = !eof;

    std::size_t correct = 0;
    for (const auto& a : session.answers) correct += a.correct ? 1 : 0;
    out << "\n" << (session.completed ? "Session complete" : "Session ended early") << ": " << correct << "/"
        << session.answers.size() << " correct (" << percent(session.score_fraction()) << ")\n";
    const auto path = f.result_out.empty() ? sibling_path(f.quiz, ".session.json") : f.result_out;
    write_text_file(path, session_to_json(session));
    out << "result: " << path << "\n";
    return kExitOk;
}

// Restores the previous default logger on scope exit.
class LoggerScope {
public:
    LoggerScope(std::ostream& err, bool verbose) : previous_(spdlog::default_logger()) {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
        auto logger = std::make_shared<spdlog::logger>("quizgen", std::move(sink));
        logger->set_pattern("[%l] %v");
        logger->set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
        spdlog::set_default_logger(std::move(logger));
    }
    ~LoggerScope() { spdlog::set_default_logger(previous_); }
    LoggerScope(const LoggerScope&) = delete;
    LoggerScope& operator=(const LoggerScope&) = delete;

private:
    std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

Document load_document(const std::string& path, const std::string& grobid_url) {
    const fs::path p(path);
    if (!fs::exists(p)) throw Error("input not found: " + path);
    auto ext = text::to_lower(p.extension().string());
    if (ext == ".pdf") return parse_structured_document(read_text_file(path), grobid_url, p.filename().string());
    if (ext == ".xml" || ext == ".tei") return parse_tei_document(read_text_file(path), p.stem().string());
    return load_plaintext_file(path);
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Concept-driven multiple-choice quiz generation", "quizgen"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    GenerateFlags gen;
    auto* g = app.add_subcommand("generate", "Generate a quiz from a document");
    g->add_option("-i,--input", gen.input, "Document (.md/.txt, .xml TEI, or .pdf)")->required();
    g->add_option("--method", gen.method, "savaal | direct | summary | single_prompt")
        ->check(CLI::IsMember({"savaal", "direct", "summary", "single_prompt", "single-prompt"}));
    g->add_option("-n", gen.n, "Number of questions")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Shuffle seed");
    g->add_option("-k", gen.k, "Passages retrieved per main idea")->check(CLI::PositiveNumber);
    g->add_option("--batch", gen.batch, "Questions per turn for direct and summary")->check(CLI::PositiveNumber);
    g->add_flag("--refine", gen.refine, "Refine distractors after generation");
    g->add_option("-o,--out", gen.out, "Quiz file");
    g->add_option("--ledger-out", gen.ledger_out, "Ledger file (default: beside the quiz)");
    g->add_option("--created-at", gen.created_at, "Timestamp to record instead of the current time");
    gen.model.add_to(g, true);

    JudgeFlags judge;
    auto* j = app.add_subcommand("judge", "Score a quiz with the judge rubrics");
    j->add_option("--quiz", judge.quiz, "Quiz file")->required()->check(CLI::ExistingFile);
    std::vector<std::string> metric_names;
    for (auto m : kAllMetrics) metric_names.emplace_back(to_string(m));
    j->add_option("--metrics", judge.metrics, "Comma-separated metrics (default: all)")
        ->delimiter(',')
        ->check(CLI::IsMember(metric_names));
    j->add_option("-o,--out", judge.out, "Scores file (default: beside the quiz)");
    judge.model.add_to(j, false);

    CostFlags cost;
    auto* c = app.add_subcommand("cost", "Modeled cost sweep and crossover analysis");
    c->alias("cost-report");
    c->add_option("--prices", cost.prices, "Price preset file");
    c->add_option("--preset", cost.preset, "Preset name (default: the file's default)");
    cost.doc_tokens_opt = c->add_option("--doc-tokens", cost.doc_tokens, "Document size D in tokens")
                              ->check(CLI::PositiveNumber);
    cost.summary_tokens_opt = c->add_option("--summary-tokens", cost.summary_tokens, "Summary size D_s in tokens")
                                  ->check(CLI::PositiveNumber);
    c->add_option("--b", cost.b, "Direct batch size")->check(CLI::PositiveNumber);
    c->add_option("--bs", cost.b_s, "Summary batch size")->check(CLI::PositiveNumber);
    c->add_option("--q-out", cost.q_out, "Output tokens per question")->check(CLI::PositiveNumber);
    c->add_option("--f-ratio", cost.f_ratio, "Pipeline fixed cost as a multiple of A*D")->check(CLI::PositiveNumber);
    c->add_option("--cache-discount", cost.cache_discount, "Price multiplier for cached input")
        ->check(CLI::Range(0.0, 1.0));
    c->add_option("--n-min", cost.n_min, "Sweep start")->check(CLI::PositiveNumber);
    c->add_option("--n-max", cost.n_max, "Sweep end")->check(CLI::PositiveNumber);
    c->add_option("--n-step", cost.n_step, "Sweep step")->check(CLI::PositiveNumber);
    c->add_option("--parity-at", cost.parity_at, "Report the direct batch size matching the pipeline at this N")
        ->check(CLI::PositiveNumber);
    c->add_option("--ledger", cost.ledger, "Ledger file to reconcile")->check(CLI::ExistingFile);

    QuizFlags quiz;
    auto* qz = app.add_subcommand("quiz", "Take a quiz in the terminal");
    qz->add_option("--quiz", quiz.quiz, "Quiz file")->required()->check(CLI::ExistingFile);
    qz->add_flag("--shuffle-questions", quiz.shuffle_questions, "Present questions in seeded random order");
    qz->add_option("--seed", quiz.seed, "Question order seed");
    qz->add_option("--result-out", quiz.result_out, "Session result file (default: beside the quiz)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    LoggerScope logging(err, verbose);
    try {
        if (*g) return cmd_generate(gen, out);
        if (*j) return cmd_judge(judge, out);
        if (*c) {
            if (cost.n_min > cost.n_max) {
                err << "error: --n-min exceeds --n-max\n";
                return kExitUsage;
            }
            return cmd_cost(cost, out);
        }
        if (*qz) return cmd_quiz(quiz, in, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace quizgen
