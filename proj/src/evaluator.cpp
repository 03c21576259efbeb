#include "ivy/evaluator.hpp"

#include "ivy/error.hpp"

namespace ivy {

namespace {

std::string splice_argument(const Json& value) {
    if (!value.is_array()) return splice_text(value);
    std::string out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out += ',';
        out += splice_text(value[i]);
    }
    return out;
}

Expression lift(const Json& value) {
    if (!value.is_array()) return Expression(value);
    ListExpr list;
    for (const auto& item : value) list.items.emplace_back(item);
    return Expression(std::move(list));
}

struct Substituter {
    const Settings& settings;
    const std::vector<Symbol>& symbols;

    Json lookup(const std::string& name) const { return binding_value(name, settings, symbols); }

    Expression run(const Expression& e) const {
        return std::visit(
            [&](const auto& n) -> Expression {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Json>) {
                    return e;
                } else if constexpr (std::is_same_v<T, VariableRef>) {
                    return lift(lookup(n.name));
                } else if constexpr (std::is_same_v<T, InterpolatedString>) {
                    std::string text;
                    for (const auto& seg : n.segments) {
                        if (const auto* lit = std::get_if<std::string>(&seg)) {
                            text += *lit;
                        } else {
                            text += splice_argument(lookup(std::get<VariableRef>(seg).name));
                        }
                    }
                    return Expression(Json(std::move(text)));
                } else if constexpr (std::is_same_v<T, ObjectExpr>) {
                    ObjectExpr out;
                    out.keys = n.keys;
                    out.values.reserve(n.values.size());
                    for (const auto& v : n.values) out.values.push_back(run(v));
                    return Expression(std::move(out));
                } else if constexpr (std::is_same_v<T, ListExpr>) {
                    ListExpr out;
                    out.items.reserve(n.items.size());
                    for (const auto& v : n.items) out.items.push_back(run(v));
                    return Expression(std::move(out));
                } else {
                    auto bound = n.query.bind([&](const std::string& name) { return lookup(name); });
                    Conditional out{std::move(bound), nullptr, nullptr};
                    if (n.then_branch) out.then_branch = std::make_shared<const Expression>(run(*n.then_branch));
                    if (n.else_branch) out.else_branch = std::make_shared<const Expression>(run(*n.else_branch));
                    return Expression(std::move(out));
                }
            },
            e.node());
    }
};

}  // namespace

Json binding_value(std::string_view name, const Settings& s, const std::vector<Symbol>& symbols) {
    if (const auto* v = s.find(name)) return v->to_json();
    for (const auto& sym : symbols) {
        if (sym.name == name) return sym.name;
    }
    return nullptr;
}

Expression substitute(const Expression& body, const Settings& s, const std::vector<Symbol>& symbols) {
    return Substituter{s, symbols}.run(body);
}

bool eval_predicate(const Predicate& p, const Settings& s, const std::vector<Symbol>& symbols) {
    return p.evaluate([&](const std::string& name) { return binding_value(name, s, symbols); });
}

std::optional<Json> evaluate(const Expression& e) {
    return std::visit(
        [&](const auto& n) -> std::optional<Json> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Json>) {
                return n;
            } else if constexpr (std::is_same_v<T, ObjectExpr>) {
                Json out = Json::object();
                for (std::size_t i = 0; i < n.keys.size(); ++i) {
                    if (auto v = evaluate(n.values[i])) out[n.keys[i]] = std::move(*v);
                }
                return out;
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                Json out = Json::array();
                for (const auto& item : n.items) {
                    if (auto v = evaluate(item)) out.push_back(std::move(*v));
                }
                return out;
            } else if constexpr (std::is_same_v<T, Conditional>) {
                // Substituted predicates hold no identifiers; any left over read as null.
                bool holds = n.query.evaluate([](const std::string&) { return Json(nullptr); });
                const auto& branch = holds ? n.then_branch : n.else_branch;
                if (!branch) return std::nullopt;
                return evaluate(*branch);
            } else {
                // References are gone after substitution; an unsubstituted one is unset.
                return evaluate(substitute(e, Settings{}));
            }
        },
        e.node());
}

std::optional<Json> evaluate(const Expression& body, const Settings& s, const std::vector<Symbol>& symbols) {
    return evaluate(substitute(body, s, symbols));
}

Json evaluate_spec(const Expression& e) {
    auto v = evaluate(e);
    if (!v) throw Error(ErrorCode::TopLevelBottom, "the whole template body evaluated to a deleted conditional");
    return std::move(*v);
}

Json instantiate(const Template& t, const Settings& s) {
    return evaluate_spec(substitute(t.body, with_defaults(t, s), t.symbols));
}

Json apply_template(const Template& t, const Settings& s, const Dataset* d, const LanguageRegistry& languages,
                    ApplyOptions options) {
    const auto& lang = languages.get(t.language);
    auto violations = validate_settings(t, s);
    if (!violations.empty()) {
        Json detail = Json::array();
        for (const auto& v : violations) detail.push_back({{"parameter", v.parameter}, {"reason", v.reason}});
        throw Error(ErrorCode::SettingsViolation, "settings do not match the template parameters",
                    {{"violations", detail}});
    }

    Json spec = instantiate(t, s);
    if (d && lang.data_injection_pointer) {
        Dataset filtered = s.filters ? apply_filters(*d, *s.filters) : *d;
        spec = languages.inject_data(t.language, std::move(spec), filtered.rows);
    }
    if (options.validate) {
        auto errors = languages.validate_spec(t.language, spec);
        if (!errors.empty()) {
            throw Error(ErrorCode::SchemaViolation, "output does not conform to the " + lang.display_name + " schema",
                        {{"errors", schema_errors_to_json(errors)}});
        }
    }
    return spec;
}

std::vector<std::string> visible_params(const Template& t, const Settings& s) {
    Settings filled = with_defaults(t, s);
    std::vector<std::string> out;
    for (const auto& p : t.params) {
        if (!p.display_predicate || eval_predicate(*p.display_predicate, filled, t.symbols)) out.push_back(p.name);
    }
    return out;
}

}  // namespace ivy
