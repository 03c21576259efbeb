#include "ivy/rewrite.hpp"

#include "ivy/error.hpp"
#include "ivy/parser.hpp"

#include <algorithm>

namespace ivy {

namespace {

constexpr double kSizeMin = 20;
constexpr double kSizeMax = 2000;
constexpr double kSizeStep = 10;

struct RuleSet {
    bool data_fields = false;
    bool data_fields_need_encode = false;
    bool sizes = false;
    bool schemes = false;
};

RuleSet rules_for(const std::string& name) {
    if (name == "vega-lite") return {true, false, true, true};
    if (name == "vega") return {true, true, false, false};
    return {};
}

class Scanner {
public:
    Scanner(RuleSet rules, const std::vector<Column>* columns) : rules_(rules), columns_(columns) {}

    void walk(const Expression& e, const std::string& path, const std::string& parent_key, bool under_encode) {
        if (const auto* obj = e.as<ObjectExpr>()) {
            for (std::size_t i = 0; i < obj->keys.size(); ++i) {
                const auto& key = obj->keys[i];
                const auto& value = obj->values[i];
                std::string child = path + "/" + pointer_escape(key);
                if (const auto* lit = value.as<Json>()) {
                    match_literal(key, *lit, child, parent_key, under_encode);
                } else {
                    walk(value, child, key, under_encode || key == "encode");
                }
            }
        } else if (const auto* list = e.as<ListExpr>()) {
            for (std::size_t i = 0; i < list->items.size(); ++i) {
                walk(list->items[i], path + "/" + std::to_string(i), "", under_encode);
            }
        }
    }

    std::vector<Suggestion> take() { return std::move(out_); }

private:
    void match_literal(const std::string& key, const Json& lit, const std::string& path, const std::string& parent_key,
                       bool under_encode) {
        if (rules_.data_fields && key == "field" && lit.is_string() && (under_encode || !rules_.data_fields_need_encode)) {
            data_field(lit, path, parent_key);
        } else if (rules_.sizes && (key == "width" || key == "height") && lit.is_number()) {
            double v = lit.get<double>();
            param::Number n{std::min(kSizeMin, v), std::max(kSizeMax, v), kSizeStep};
            add(SuggestionKind::AbstractLiteral, "abstract-size", path, key, ParamType(n), lit,
                "Make " + key + " " + lit.dump() + " a number parameter");
        } else if (rules_.schemes && key == "scheme" && lit.is_string()) {
            param::Enum en{{lit.get<std::string>()}};
            add(SuggestionKind::AbstractLiteral, "abstract-scheme", path, "scheme", ParamType(en), lit,
                "Make color scheme \"" + lit.get<std::string>() + "\" a choice parameter");
        }
    }

    void data_field(const Json& lit, const std::string& path, const std::string& parent_key) {
        const auto& column = lit.get_ref<const std::string&>();
        RoleSet roles{DataRole::Measure, DataRole::Dimension, DataRole::Time};
        if (columns_) {
            auto it = std::find_if(columns_->begin(), columns_->end(), [&](const Column& c) { return c.name == column; });
            if (it == columns_->end()) return;
            roles = {it->role};
        }
        std::string name = !parent_key.empty() && is_identifier(parent_key) ? parent_key + "Dim" : "field";
        add(SuggestionKind::AbstractDataField, "abstract-field", path, name, ParamType(param::DataTarget{roles, false}),
            lit, "Replace field \"" + column + "\" with a data parameter");
    }

    void add(SuggestionKind kind, const std::string& rule, const std::string& path, const std::string& name,
             ParamType type, const Json& lit, std::string description) {
        Suggestion sg;
        sg.id = rule + ":" + path;
        sg.description = std::move(description);
        sg.path = path;
        sg.kind = kind;
        sg.proposed_param.name = name;
        sg.proposed_param.type = std::move(type);
        if (kind == SuggestionKind::AbstractLiteral) sg.proposed_param.default_value = ArgumentValue(lit);
        sg.replacement = Expression(VariableRef{name});
        sg.original = lit;
        out_.push_back(std::move(sg));
    }

    RuleSet rules_;
    const std::vector<Column>* columns_;
    std::vector<Suggestion> out_;
};

}  // namespace

std::string_view suggestion_kind_name(SuggestionKind kind) {
    return kind == SuggestionKind::AbstractDataField ? "AbstractDataField" : "AbstractLiteral";
}

std::vector<Suggestion> suggest_with_rules(const Expression& body, const std::string& rule_set,
                                           const std::vector<Column>* columns) {
    Scanner scanner(rules_for(rule_set), columns);
    scanner.walk(body, "", "", false);
    return scanner.take();
}

std::vector<Suggestion> suggest(const Expression& body, const std::string& language, const std::vector<Column>* columns,
                                const LanguageRegistry& languages) {
    return suggest_with_rules(body, languages.get(language).rewrite_rule_set, columns);
}

std::string fresh_param_name(const Template& t, const std::string& preferred) {
    auto taken = [&](const std::string& n) { return t.find_param(n) || t.find_symbol(n); };
    if (!taken(preferred)) return preferred;
    for (std::size_t k = 2;; ++k) {
        std::string candidate = preferred + std::to_string(k);
        if (!taken(candidate)) return candidate;
    }
}

Template apply_suggestion(const Template& t, const Suggestion& sg) {
    const Expression* node = resolve_pointer(t.body, sg.path);
    const Json* lit = node ? node->as<Json>() : nullptr;
    if (!lit || *lit != sg.original) {
        throw Error(ErrorCode::StalePath, "body changed at " + sg.path + " since the suggestion was made",
                    {{"path", sg.path}, {"id", sg.id}});
    }
    Template out = t;
    std::string name = fresh_param_name(t, sg.proposed_param.name);
    out.body = replace_at_pointer(t.body, sg.path, Expression(VariableRef{name}));
    Parameter p = sg.proposed_param;
    p.name = name;
    out.params.push_back(std::move(p));
    out.version = t.version + 1;
    return out;
}

Json suggestion_to_json(const Suggestion& sg) {
    Json out = Json::object();
    out["id"] = sg.id;
    out["description"] = sg.description;
    out["path"] = sg.path;
    out["kind"] = std::string(suggestion_kind_name(sg.kind));
    out["proposedParam"] = parameter_to_json(sg.proposed_param);
    out["replacement"] = serialize_body(sg.replacement);
    out["original"] = sg.original;
    return out;
}

}  // namespace ivy
