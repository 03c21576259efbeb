#pragma once

#include "ivy/data.hpp"
#include "ivy/expression.hpp"
#include "ivy/languages.hpp"
#include "ivy/model.hpp"

#include <string>
#include <vector>

namespace ivy {

enum class SuggestionKind { AbstractDataField, AbstractLiteral };
std::string_view suggestion_kind_name(SuggestionKind kind);

struct Suggestion {
    std::string id;
    std::string description;
    /// JSON Pointer into the body.
    std::string path;
    SuggestionKind kind;
    /// Parameter to add; its name is the preferred name, made fresh on apply.
    Parameter proposed_param;
    /// Reference to the proposed parameter.
    Expression replacement;
    /// The literal found at `path`, checked again when the suggestion is applied.
    Json original;
};

/// Rule matches over object and list nodes in document order. Conditionals
/// are not entered. With `columns`, data-field rules fire only for known
/// column names and restrict roles to that column's role; without, every
/// string field value matches and all roles are allowed.
/// Throws UnknownLanguage.
std::vector<Suggestion> suggest(const Expression& body, const std::string& language, const std::vector<Column>* columns,
                                const LanguageRegistry& languages);

/// Rule set without a registry lookup; unknown rule sets have no rules.
std::vector<Suggestion> suggest_with_rules(const Expression& body, const std::string& rule_set,
                                           const std::vector<Column>* columns);

/// Replaces the literal at the suggestion's path with a reference to a fresh
/// parameter (`name`, `name2`, `name3`, ...) and bumps the version.
/// Throws StalePath when the body no longer holds the original literal there.
Template apply_suggestion(const Template& t, const Suggestion& sg);

/// Name apply_suggestion would give the proposed parameter.
std::string fresh_param_name(const Template& t, const std::string& preferred);

Json suggestion_to_json(const Suggestion& sg);

}  // namespace ivy
