#include "quizgen/quiz_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quizgen/errors.hpp"
#include "quizgen/text.hpp"

namespace quizgen {

namespace {

using ojson = nlohmann::ordered_json;

std::string dump(const ojson& j) { return j.dump(2, ' ', false) + "\n"; }

ojson usage_json(const TokenUsage& u) {
    ojson j;
    j["prompt_tokens"] = u.prompt_tokens;
    j["completion_tokens"] = u.completion_tokens;
    j["cached_prompt_tokens"] = u.cached_prompt_tokens;
    return j;
}

ojson parse_or_throw(const std::string& s, const char* what) {
    try {
        return ojson::parse(s);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string(what) + " is not valid JSON: " + e.what());
    }
}

const ojson& field(const ojson& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw SchemaError(where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

std::string str_field(const ojson& obj, const std::string& key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::uint64_t uint_field(const ojson& obj, const std::string& key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw SchemaError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

TokenUsage usage_from(const ojson& j, const std::string& where) {
    TokenUsage u;
    u.prompt_tokens = uint_field(j, "prompt_tokens", where);
    u.completion_tokens = uint_field(j, "completion_tokens", where);
    u.cached_prompt_tokens = uint_field(j, "cached_prompt_tokens", where);
    return u;
}

Method method_field(const ojson& obj, const std::string& where) {
    try {
        return method_from_string(str_field(obj, "method", where));
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(where + ".method: " + e.what());
    }
}

}  // namespace

std::string iso8601_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string quiz_to_json(const Quiz& quiz) {
    ojson j;
    j["version"] = kFileVersion;
    j["doc_id"] = quiz.doc_id;
    j["title"] = quiz.title;
    j["method"] = std::string(to_string(quiz.method));
    j["model"] = quiz.model;
    j["seed"] = quiz.seed;
    j["created_at"] = quiz.created_at;
    auto& qs = j["questions"] = ojson::array();
    for (const auto& q : quiz.questions) {
        ojson e;
        e["id"] = q.id;
        e["stem"] = q.stem;
        e["choices"] = q.choices;
        e["correct_index"] = q.correct_index;
        if (q.idea_title) e["idea_title"] = *q.idea_title;
        e["passage_ids"] = q.passage_ids;
        qs.push_back(std::move(e));
    }
    j["usage"] = usage_json(quiz.usage_totals);
    return dump(j);
}

Quiz quiz_from_json(const std::string& json) {
    const auto j = parse_or_throw(json, "quiz file");
    if (!j.is_object()) throw SchemaError("quiz: expected an object");
    if (str_field(j, "version", "quiz") != kFileVersion) throw SchemaError("quiz.version: unsupported version");
    Quiz quiz;
    quiz.doc_id = str_field(j, "doc_id", "quiz");
    quiz.title = str_field(j, "title", "quiz");
    quiz.method = method_field(j, "quiz");
    quiz.model = str_field(j, "model", "quiz");
    quiz.seed = uint_field(j, "seed", "quiz");
    quiz.created_at = str_field(j, "created_at", "quiz");
    const auto& qs = field(j, "questions", "quiz");
    if (!qs.is_array()) throw SchemaError("quiz.questions: expected an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto where = "quiz.questions[" + std::to_string(i) + "]";
        const auto& e = qs[i];
        Question q;
        q.method = quiz.method;
        q.id = str_field(e, "id", where);
        q.stem = str_field(e, "stem", where);
        const auto& ch = field(e, "choices", where);
        if (!ch.is_array() || ch.size() != 4) throw SchemaError(where + ".choices: expected 4 strings");
        for (std::size_t c = 0; c < 4; ++c) {
            if (!ch[c].is_string()) throw SchemaError(where + ".choices: expected 4 strings");
            q.choices[c] = ch[c].get<std::string>();
        }
        const auto& ci = field(e, "correct_index", where);
        if (!ci.is_number_integer()) throw SchemaError(where + ".correct_index: expected an integer");
        q.correct_index = ci.get<int>();
        if (e.contains("idea_title")) q.idea_title = str_field(e, "idea_title", where);
        const auto& pids = field(e, "passage_ids", where);
        if (!pids.is_array()) throw SchemaError(where + ".passage_ids: expected an array");
        for (const auto& p : pids) {
            if (!p.is_string()) throw SchemaError(where + ".passage_ids: expected strings");
            q.passage_ids.push_back(p.get<std::string>());
        }
        std::string why;
        if (!is_valid(q, &why)) throw SchemaError(where + ": " + why);
        for (const auto& prev : quiz.questions)
            if (prev.id == q.id) throw SchemaError(where + ".id: duplicate question id " + q.id);
        quiz.questions.push_back(std::move(q));
    }
    quiz.usage_totals = usage_from(field(j, "usage", "quiz"), "quiz.usage");
    return quiz;
}

std::string quiz_id(const Quiz& quiz) {
    std::uint64_t h = text::fnv1a64(quiz.doc_id);
    h = text::fnv1a64(to_string(quiz.method), h);
    h = text::fnv1a64(std::to_string(quiz.seed), h);
    for (const auto& q : quiz.questions) h = text::fnv1a64(q.id, h);
    return "quiz-" + text::hex64(h);
}

std::string ledger_to_json(const LedgerFile& ledger) {
    ojson j;
    j["version"] = kFileVersion;
    j["doc_id"] = ledger.doc_id;
    j["method"] = std::string(to_string(ledger.method));
    j["N"] = ledger.n;
    j["model"] = ledger.model;
    j["doc_tokens"] = ledger.doc_tokens;
    if (ledger.summary_tokens) j["summary_tokens"] = *ledger.summary_tokens;
    auto& arr = j["entries"] = ojson::array();
    TokenUsage totals;
    for (const auto& e : ledger.entries) {
        ojson x;
        x["stage"] = e.stage_tag;
        x["prompt_tokens"] = e.prompt_tokens;
        x["completion_tokens"] = e.completion_tokens;
        x["cached_prompt_tokens"] = e.cached_prompt_tokens;
        arr.push_back(std::move(x));
        totals += e;
    }
    j["totals"] = usage_json(totals);
    return dump(j);
}

LedgerFile ledger_from_json(const std::string& json) {
    const auto j = parse_or_throw(json, "ledger file");
    if (!j.is_object()) throw SchemaError("ledger: expected an object");
    LedgerFile l;
    l.doc_id = str_field(j, "doc_id", "ledger");
    l.method = method_field(j, "ledger");
    l.n = uint_field(j, "N", "ledger");
    l.model = str_field(j, "model", "ledger");
    l.doc_tokens = uint_field(j, "doc_tokens", "ledger");
    if (j.contains("summary_tokens")) l.summary_tokens = uint_field(j, "summary_tokens", "ledger");
    const auto& arr = field(j, "entries", "ledger");
    if (!arr.is_array()) throw SchemaError("ledger.entries: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto where = "ledger.entries[" + std::to_string(i) + "]";
        auto u = usage_from(arr[i], where);
        u.stage_tag = str_field(arr[i], "stage", where);
        l.entries.push_back(std::move(u));
    }
    return l;
}

std::string scores_to_json(const std::vector<JudgeScore>& scores) {
    ojson j;
    auto& arr = j["scores"] = ojson::array();
    for (const auto& s : scores) {
        ojson e;
        e["question_id"] = s.question_id;
        e["metric"] = std::string(to_string(s.metric));
        e["score"] = s.score;
        e["label"] = s.label;
        arr.push_back(std::move(e));
    }
    auto& agg = j["aggregate"] = ojson::object();
    for (const auto& [metric, d] : aggregate(scores)) {
        ojson m;
        m["total"] = d.total;
        ojson counts, fractions;
        for (int s = 4; s >= 1; --s) {
            const auto label = std::string(label_for(s));
            counts[label] = d.counts[static_cast<std::size_t>(s - 1)];
            fractions[label] = d.fraction(s);
        }
        m["counts"] = counts;
        m["fractions"] = fractions;
        m["negative_fraction"] = d.negative_fraction();
        agg[std::string(to_string(metric))] = std::move(m);
    }
    return dump(j);
}

double SessionResult::score_fraction() const {
    if (answers.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& a : answers) correct += a.correct ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(answers.size());
}

std::string session_to_json(const SessionResult& s) {
    ojson j;
    j["quiz_id"] = s.quiz_id;
    auto& arr = j["answers"] = ojson::array();
    for (const auto& a : s.answers) {
        ojson e;
        e["question_id"] = a.question_id;
        e["chosen_index"] = a.chosen_index;
        e["correct"] = a.correct;
        arr.push_back(std::move(e));
    }
    j["score_fraction"] = s.score_fraction();
    j["completed"] = s.completed;
    return dump(j);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("write failed for " + path);
}

}  // namespace quizgen
