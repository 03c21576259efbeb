#pragma once

#include "ivy/data.hpp"
#include "ivy/expression.hpp"
#include "ivy/json.hpp"
#include "ivy/languages.hpp"
#include "ivy/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ivy {

/// Value an identifier takes during substitution: the argument if set, the
/// symbol's own name for a symbol, otherwise null.
Json binding_value(std::string_view name, const Settings& s, const std::vector<Symbol>& symbols);

/// Step A: replaces references with argument values (typed for whole-string
/// references, spliced text inside interpolations) and binds conditional
/// predicates to literals. Conditionals are kept, not evaluated.
Expression substitute(const Expression& body, const Settings& s, const std::vector<Symbol>& symbols = {});

bool eval_predicate(const Predicate& p, const Settings& s, const std::vector<Symbol>& symbols = {});

/// Step B on a substituted expression. nullopt is bottom: an else-less
/// conditional whose query is false. Bottom fields and list items are dropped.
std::optional<Json> evaluate(const Expression& e);

/// substitute() then evaluate().
std::optional<Json> evaluate(const Expression& body, const Settings& s, const std::vector<Symbol>& symbols = {});

/// evaluate() that throws TopLevelBottom instead of returning bottom.
Json evaluate_spec(const Expression& e);

/// Output spec for `s` with defaults filled in; no data, no validation.
Json instantiate(const Template& t, const Settings& s);

struct ApplyOptions {
    bool validate = true;
};

/// Full template application. Throws SettingsViolation (detail lists each
/// parameter), TopLevelBottom, UnknownLanguage, UnknownColumn and
/// SchemaViolation (detail lists the schema errors).
Json apply_template(const Template& t, const Settings& s, const Dataset* d, const LanguageRegistry& languages,
                    ApplyOptions options = {});

/// Parameters whose display predicate is absent or holds, declaration order.
/// Predicates see the settings with defaults filled in.
std::vector<std::string> visible_params(const Template& t, const Settings& s);

}  // namespace ivy
