#include "ivy/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace ivy {

std::string_view role_name(DataRole role) {
    switch (role) {
        case DataRole::Measure: return "Measure";
        case DataRole::Dimension: return "Dimension";
        case DataRole::Time: return "Time";
    }
    return "Dimension";
}

std::optional<DataRole> parse_role(std::string_view text) {
    if (text == "Measure") return DataRole::Measure;
    if (text == "Dimension") return DataRole::Dimension;
    if (text == "Time") return DataRole::Time;
    return std::nullopt;
}

std::string_view type_name(const ParamType& type) {
    struct Visitor {
        std::string_view operator()(const param::DataTarget&) const { return "DataTarget"; }
        std::string_view operator()(const param::MultiDataTarget&) const { return "MultiDataTarget"; }
        std::string_view operator()(const param::String&) const { return "String"; }
        std::string_view operator()(const param::Number&) const { return "Number"; }
        std::string_view operator()(const param::Boolean&) const { return "Boolean"; }
        std::string_view operator()(const param::Enum&) const { return "Enum"; }
        std::string_view operator()(const param::Text&) const { return "Text"; }
        std::string_view operator()(const param::Section&) const { return "Section"; }
    };
    return std::visit(Visitor{}, type);
}

bool is_data_param(const ParamType& type) {
    return std::holds_alternative<param::DataTarget>(type) || std::holds_alternative<param::MultiDataTarget>(type);
}

std::string_view match_name(MatchKind kind) {
    switch (kind) {
        case MatchKind::Complete: return "Complete";
        case MatchKind::Partial: return "Partial";
        case MatchKind::NoMatch: return "NoMatch";
    }
    return "NoMatch";
}

std::string_view diagnostic_name(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::UndeclaredVariable: return "UndeclaredVariable";
        case DiagnosticKind::UnusedParameter: return "UnusedParameter";
        case DiagnosticKind::DuplicateName: return "DuplicateName";
        case DiagnosticKind::InvalidParamConfig: return "InvalidParamConfig";
        case DiagnosticKind::InvalidDefault: return "InvalidDefault";
    }
    return "Unknown";
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    auto head = static_cast<unsigned char>(text[0]);
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(text.begin() + 1, text.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return std::isalnum(u) || u == '_';
    });
}

ArgumentValue::ArgumentValue(Json atomic) : value_(std::move(atomic)) {}

bool ArgumentValue::is_null() const noexcept {
    const auto* j = std::get_if<Json>(&value_);
    return j && j->is_null();
}

Json ArgumentValue::to_json() const {
    if (is_list()) return Json(list());
    return atomic();
}

bool operator==(const ArgumentValue& a, const ArgumentValue& b) {
    return a.value_ == b.value_;
}

const ArgumentValue* Settings::find(std::string_view name) const {
    for (const auto& [key, value] : entries_) {
        if (key == name) return &value;
    }
    return nullptr;
}

void Settings::set(std::string name, ArgumentValue value) {
    for (auto& [key, existing] : entries_) {
        if (key == name) {
            existing = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(name), std::move(value));
}

void Settings::erase(std::string_view name) {
    std::erase_if(entries_, [&](const Entry& e) { return e.first == name; });
}

bool Settings::same_bindings(const Settings& other) const {
    if (entries_.size() != other.entries_.size() || filters != other.filters) return false;
    return std::all_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
        const auto* v = other.find(e.first);
        return v && *v == e.second;
    });
}

const Parameter* Template::find_param(std::string_view param_name) const {
    for (const auto& p : params) {
        if (p.name == param_name) return &p;
    }
    return nullptr;
}

const Symbol* Template::find_symbol(std::string_view symbol_name) const {
    for (const auto& s : symbols) {
        if (s.name == symbol_name) return &s;
    }
    return nullptr;
}

namespace {

std::optional<std::string> config_problem(const ParamType& type) {
    struct Visitor {
        std::optional<std::string> operator()(const param::DataTarget& d) const {
            if (d.allowed_roles.empty()) return "allowedRoles is empty";
            return std::nullopt;
        }
        std::optional<std::string> operator()(const param::MultiDataTarget& d) const {
            if (d.allowed_roles.empty()) return "allowedRoles is empty";
            if (d.min_count && d.max_count && *d.min_count > *d.max_count) return "minCount exceeds maxCount";
            if (d.max_count && *d.max_count == 0) return "maxCount is zero";
            return std::nullopt;
        }
        std::optional<std::string> operator()(const param::Number& n) const {
            if (!(n.min <= n.max)) return "min exceeds max";
            if (!(n.step > 0)) return "step must be positive";
            return std::nullopt;
        }
        std::optional<std::string> operator()(const param::Enum& e) const {
            if (e.allowed_values.empty()) return "allowedValues is empty";
            std::set<std::string> seen(e.allowed_values.begin(), e.allowed_values.end());
            if (seen.size() != e.allowed_values.size()) return "allowedValues has duplicates";
            return std::nullopt;
        }
        std::optional<std::string> operator()(const param::String&) const { return std::nullopt; }
        std::optional<std::string> operator()(const param::Boolean&) const { return std::nullopt; }
        std::optional<std::string> operator()(const param::Text&) const { return std::nullopt; }
        std::optional<std::string> operator()(const param::Section&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, type);
}

bool display_only(const ParamType& type) {
    return std::holds_alternative<param::Text>(type) || std::holds_alternative<param::Section>(type);
}

}  // namespace

std::vector<Diagnostic> lint_template(const Template& t) {
    std::vector<Diagnostic> out;

    std::set<std::string> declared;
    for (const auto& p : t.params) {
        if (!declared.insert(p.name).second) {
            out.push_back({DiagnosticKind::DuplicateName, p.name, "parameter '" + p.name + "' is declared more than once"});
        }
    }
    for (const auto& s : t.symbols) {
        if (!declared.insert(s.name).second) {
            out.push_back({DiagnosticKind::DuplicateName, s.name, "symbol '" + s.name + "' collides with another declaration"});
        }
    }

    for (const auto& p : t.params) {
        if (auto problem = config_problem(p.type)) {
            out.push_back({DiagnosticKind::InvalidParamConfig, p.name, "parameter '" + p.name + "': " + *problem});
        } else if (p.default_value) {
            if (auto v = validate_argument(p, *p.default_value)) {
                out.push_back({DiagnosticKind::InvalidDefault, p.name, "default for '" + p.name + "': " + v->reason});
            }
        }
    }

    std::vector<std::string> used = referenced_names(t.body);
    std::vector<std::string> display_refs;
    for (const auto& p : t.params) {
        if (!p.display_predicate) continue;
        for (const auto& id : p.display_predicate->identifiers()) {
            if (std::find(display_refs.begin(), display_refs.end(), id) == display_refs.end()) display_refs.push_back(id);
        }
    }

    std::vector<std::string> all_refs = used;
    for (const auto& id : display_refs) {
        if (std::find(all_refs.begin(), all_refs.end(), id) == all_refs.end()) all_refs.push_back(id);
    }
    for (const auto& name : all_refs) {
        if (!declared.count(name)) {
            out.push_back({DiagnosticKind::UndeclaredVariable, name, "'" + name + "' is not a declared parameter or symbol"});
        }
    }

    for (const auto& p : t.params) {
        if (display_only(p.type)) continue;
        if (std::find(all_refs.begin(), all_refs.end(), p.name) == all_refs.end()) {
            out.push_back({DiagnosticKind::UnusedParameter, p.name, "parameter '" + p.name + "' is never referenced"});
        }
    }
    return out;
}

std::optional<Violation> validate_argument(const Parameter& p, const ArgumentValue& v) {
    if (v.is_null()) return std::nullopt;
    auto violation = [&](std::string reason) { return Violation{p.name, std::move(reason)}; };

    struct Visitor {
        const ArgumentValue& v;
        decltype(violation)& fail;

        std::optional<Violation> operator()(const param::DataTarget&) const {
            if (v.is_list() || !v.atomic().is_string()) return fail("expected a column name string");
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::MultiDataTarget& m) const {
            if (!v.is_list()) return fail("expected a list of column names");
            auto n = v.list().size();
            if (m.min_count && n < *m.min_count) {
                return fail("count " + std::to_string(n) + " below minCount " + std::to_string(*m.min_count));
            }
            if (m.max_count && n > *m.max_count) {
                return fail("count " + std::to_string(n) + " above maxCount " + std::to_string(*m.max_count));
            }
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::String&) const {
            if (v.is_list() || !v.atomic().is_string()) return fail("expected a string");
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::Number& n) const {
            if (v.is_list() || !v.atomic().is_number()) return fail("expected a number");
            double x = v.atomic().get<double>();
            if (x < n.min || x > n.max) {
                return fail("out-of-range: " + splice_text(v.atomic()) + " not in [" + splice_text(Json(n.min)) + ", " +
                            splice_text(Json(n.max)) + "]");
            }
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::Boolean&) const {
            if (v.is_list() || !v.atomic().is_boolean()) return fail("expected a boolean");
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::Enum& e) const {
            if (v.is_list() || !v.atomic().is_string()) return fail("expected one of the enum values");
            const auto& s = v.atomic().get_ref<const std::string&>();
            if (std::find(e.allowed_values.begin(), e.allowed_values.end(), s) == e.allowed_values.end()) {
                return fail("'" + s + "' is not an allowed value");
            }
            return std::nullopt;
        }
        std::optional<Violation> operator()(const param::Text&) const { return fail("display-only parameter takes no value"); }
        std::optional<Violation> operator()(const param::Section&) const { return fail("display-only parameter takes no value"); }
    };
    return std::visit(Visitor{v, violation}, p.type);
}

std::vector<Violation> validate_settings(const Template& t, const Settings& s) {
    std::vector<Violation> out;
    for (const auto& [name, value] : s.entries()) {
        const Parameter* p = t.find_param(name);
        if (!p) {
            out.push_back({name, "undeclared parameter"});
            continue;
        }
        if (auto v = validate_argument(*p, value)) out.push_back(std::move(*v));
    }
    return out;
}

Settings with_defaults(const Template& t, const Settings& s) {
    Settings out = s;
    for (const auto& p : t.params) {
        if (!p.default_value) continue;
        const auto* cur = s.find(p.name);
        if (!cur || cur->is_null()) out.set(p.name, *p.default_value);
    }
    return out;
}

}  // namespace ivy
