#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace quizgen {

using TemplateVars = std::map<std::string, std::string>;

/// A prompt body with `{name}` placeholders.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::set<std::string> required_vars;

    /// Single-pass substitution: substituted values are never re-scanned.
    /// Throws MissingVariable for the first unbound placeholder.
    std::string render(const TemplateVars& vars) const;

    /// Body text up to the first placeholder, trimmed. Used to recognise a
    /// stage's instructions inside a larger prompt.
    std::string instruction_head() const;
};

/// Placeholders in body order, deduplicated.
std::vector<std::string> placeholders(std::string_view body);

/// Immutable registry of the built-in prompts:
/// map, combine, reduce, rank, savaal_generate, direct_generate,
/// direct_additional, refine, and the judge_* rubrics.
class TemplateRegistry {
public:
    static const TemplateRegistry& builtin();

    /// Throws UnknownTemplate.
    const PromptTemplate& get(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;

    std::string render(std::string_view name, const TemplateVars& vars) const {
        return get(name).render(vars);
    }

private:
    TemplateRegistry();
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

/// Shorthand for TemplateRegistry::builtin().render(...).
std::string render(std::string_view template_name, const TemplateVars& vars);

}  // namespace quizgen
