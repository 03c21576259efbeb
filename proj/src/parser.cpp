#include "ivy/parser.hpp"

#include "ivy/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace ivy {

namespace {

[[noreturn]] void bad_param(const std::string& msg, Json detail = Json::object()) {
    throw Error(ErrorCode::BadParamType, msg, std::move(detail));
}

[[noreturn]] void bad_cond(const std::string& msg) {
    throw Error(ErrorCode::BadConditionalShape, msg);
}

bool ident_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
}

// Length of an `[NAME]` token starting at `pos`, or 0.
std::size_t ref_token_length(std::string_view text, std::size_t pos) {
    if (pos >= text.size() || text[pos] != '[') return 0;
    std::size_t i = pos + 1;
    if (i >= text.size()) return 0;
    auto head = static_cast<unsigned char>(text[i]);
    if (!(std::isalpha(head) || head == '_')) return 0;
    while (i < text.size() && ident_char(text[i])) ++i;
    if (i >= text.size() || text[i] != ']') return 0;
    return i - pos + 1;
}

std::string escape_literal(std::string_view lit, bool followed_by_ref) {
    std::string out;
    out.reserve(lit.size());
    for (std::size_t i = 0; i < lit.size(); ++i) {
        char c = lit[i];
        if (c == '[') {
            bool last = i + 1 == lit.size();
            bool escape = (last && followed_by_ref) || (!last && lit[i + 1] == '[') || ref_token_length(lit, i) > 0;
            out += escape ? "[[" : "[";
        } else {
            out += c;
        }
    }
    return out;
}

std::string serialize_segments(const std::vector<Segment>& segments) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (const auto* lit = std::get_if<std::string>(&segments[i])) {
            bool next_ref = i + 1 < segments.size() && std::holds_alternative<VariableRef>(segments[i + 1]);
            out += escape_literal(*lit, next_ref);
        } else {
            out += "[" + std::get<VariableRef>(segments[i]).name + "]";
        }
    }
    return out;
}

Expression parse_conditional(const Json& spec) {
    if (!spec.is_object()) bad_cond("\"$cond\" value must be an object");
    if (!spec.contains("query")) bad_cond("\"$cond\" is missing \"query\"");
    for (const auto& [key, value] : spec.items()) {
        if (key != "query" && key != "true" && key != "false") bad_cond("\"$cond\" has unexpected key \"" + key + "\"");
    }
    const Json& query = spec.at("query");
    if (!query.is_string()) bad_cond("\"$cond\".query must be a string");
    bool has_then = spec.contains("true");
    bool has_else = spec.contains("false");
    if (!has_then && !has_else) bad_cond("\"$cond\" needs a \"true\" or \"false\" branch");

    Conditional cond{Predicate::parse(query.get<std::string>()), nullptr, nullptr};
    if (has_then) cond.then_branch = std::make_shared<const Expression>(parse_body(spec.at("true")));
    if (has_else) cond.else_branch = std::make_shared<const Expression>(parse_body(spec.at("false")));
    return Expression(std::move(cond));
}

RoleSet roles_from_json(const Json& doc, const std::string& param_name) {
    if (!doc.is_array()) bad_param("parameter '" + param_name + "': allowedRoles must be a list");
    RoleSet roles;
    for (const auto& r : doc) {
        auto role = r.is_string() ? parse_role(r.get<std::string>()) : std::nullopt;
        if (!role) bad_param("parameter '" + param_name + "': unknown data role " + r.dump());
        roles.insert(*role);
    }
    return roles;
}

Json roles_to_json(const RoleSet& roles) {
    Json out = Json::array();
    for (auto r : roles) out.push_back(std::string(role_name(r)));
    return out;
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            bad_param(where + ": unexpected key \"" + key + "\"");
        }
    }
}

double number_field(const Json& cfg, const char* key, const std::string& where) {
    if (!cfg.contains(key) || !cfg.at(key).is_number()) bad_param(where + ": \"" + key + "\" must be a number");
    return cfg.at(key).get<double>();
}

std::optional<std::size_t> count_field(const Json& cfg, const char* key, const std::string& where) {
    if (!cfg.contains(key)) return std::nullopt;
    const Json& v = cfg.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        bad_param(where + ": \"" + key + "\" must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

bool bool_field(const Json& cfg, const char* key, const std::string& where) {
    if (!cfg.contains(key)) return false;
    if (!cfg.at(key).is_boolean()) bad_param(where + ": \"" + key + "\" must be a boolean");
    return cfg.at(key).get<bool>();
}

ParamType param_type_from_json(const std::string& tag, const Json& cfg, const std::string& name) {
    std::string where = "parameter '" + name + "'";
    if (!cfg.is_object()) bad_param(where + ": config must be an object");
    if (tag == "DataTarget") {
        check_keys(cfg, {"allowedRoles", "required"}, where);
        if (!cfg.contains("allowedRoles")) bad_param(where + ": DataTarget needs allowedRoles");
        return param::DataTarget{roles_from_json(cfg.at("allowedRoles"), name), bool_field(cfg, "required", where)};
    }
    if (tag == "MultiDataTarget") {
        check_keys(cfg, {"allowedRoles", "required", "minCount", "maxCount"}, where);
        if (!cfg.contains("allowedRoles")) bad_param(where + ": MultiDataTarget needs allowedRoles");
        return param::MultiDataTarget{roles_from_json(cfg.at("allowedRoles"), name), bool_field(cfg, "required", where),
                                      count_field(cfg, "minCount", where), count_field(cfg, "maxCount", where)};
    }
    if (tag == "Number") {
        check_keys(cfg, {"min", "max", "step"}, where);
        return param::Number{number_field(cfg, "min", where), number_field(cfg, "max", where), number_field(cfg, "step", where)};
    }
    if (tag == "Enum") {
        check_keys(cfg, {"allowedValues"}, where);
        if (!cfg.contains("allowedValues") || !cfg.at("allowedValues").is_array()) {
            bad_param(where + ": Enum needs an allowedValues list");
        }
        param::Enum e;
        for (const auto& v : cfg.at("allowedValues")) {
            if (!v.is_string()) bad_param(where + ": Enum values must be strings");
            e.allowed_values.push_back(v.get<std::string>());
        }
        return e;
    }
    if (tag == "String") {
        check_keys(cfg, {}, where);
        return param::String{};
    }
    if (tag == "Boolean") {
        check_keys(cfg, {}, where);
        return param::Boolean{};
    }
    if (tag == "Text") {
        check_keys(cfg, {"text"}, where);
        if (cfg.contains("text") && !cfg.at("text").is_string()) bad_param(where + ": text must be a string");
        return param::Text{cfg.value("text", std::string())};
    }
    if (tag == "Section") {
        check_keys(cfg, {"label"}, where);
        if (cfg.contains("label") && !cfg.at("label").is_string()) bad_param(where + ": label must be a string");
        return param::Section{cfg.value("label", std::string())};
    }
    bad_param(where + ": unknown parameter type \"" + tag + "\"", {{"parameter", name}});
}

Json param_config_to_json(const ParamType& type) {
    struct Visitor {
        Json operator()(const param::DataTarget& d) const {
            Json c = Json::object();
            c["allowedRoles"] = roles_to_json(d.allowed_roles);
            c["required"] = d.required;
            return c;
        }
        Json operator()(const param::MultiDataTarget& d) const {
            Json c = Json::object();
            c["allowedRoles"] = roles_to_json(d.allowed_roles);
            c["required"] = d.required;
            if (d.min_count) c["minCount"] = *d.min_count;
            if (d.max_count) c["maxCount"] = *d.max_count;
            return c;
        }
        Json operator()(const param::Number& n) const {
            Json c = Json::object();
            auto num = [](double x) {
                double ip = 0;
                if (std::modf(x, &ip) == 0.0 && std::fabs(x) < 9.0e15) return Json(static_cast<std::int64_t>(x));
                return Json(x);
            };
            c["min"] = num(n.min);
            c["max"] = num(n.max);
            c["step"] = num(n.step);
            return c;
        }
        Json operator()(const param::Enum& e) const {
            Json c = Json::object();
            c["allowedValues"] = e.allowed_values;
            return c;
        }
        Json operator()(const param::Text& t) const {
            Json c = Json::object();
            c["text"] = t.text;
            return c;
        }
        Json operator()(const param::Section& s) const {
            Json c = Json::object();
            c["label"] = s.label;
            return c;
        }
        Json operator()(const param::String&) const { return Json::object(); }
        Json operator()(const param::Boolean&) const { return Json::object(); }
    };
    return std::visit(Visitor{}, type);
}

std::string required_string(const Json& doc, const char* key, ErrorCode code, const std::string& where) {
    if (!doc.contains(key) || !doc.at(key).is_string()) {
        throw Error(code, where + ": \"" + key + "\" must be a string");
    }
    return doc.at(key).get<std::string>();
}

}  // namespace

Expression parse_string_value(const std::string& text) {
    std::vector<Segment> segments;
    std::string literal;
    bool has_ref = false;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '[') {
            if (i + 1 < text.size() && text[i + 1] == '[') {
                literal += '[';
                i += 2;
                continue;
            }
            if (auto len = ref_token_length(text, i)) {
                if (!literal.empty()) segments.emplace_back(std::move(literal));
                literal.clear();
                segments.emplace_back(VariableRef{text.substr(i + 1, len - 2)});
                has_ref = true;
                i += len;
                continue;
            }
        }
        literal += text[i++];
    }
    if (!literal.empty()) segments.emplace_back(std::move(literal));

    if (!has_ref) {
        return Expression(Json(segments.empty() ? std::string() : std::get<std::string>(segments.front())));
    }
    if (segments.size() == 1) return Expression(std::get<VariableRef>(segments.front()));
    return Expression(InterpolatedString{std::move(segments)});
}

Expression parse_body(const Json& body) {
    if (body.is_string()) return parse_string_value(body.get<std::string>());
    if (body.is_object()) {
        if (body.contains(kCondKey)) {
            if (body.size() != 1) bad_cond("\"$cond\" must be the only key of its object");
            return parse_conditional(body.at(kCondKey));
        }
        ObjectExpr obj;
        obj.keys.reserve(body.size());
        obj.values.reserve(body.size());
        for (const auto& [key, child] : body.items()) {
            obj.keys.push_back(key);
            obj.values.push_back(parse_body(child));
        }
        return Expression(std::move(obj));
    }
    if (body.is_array()) {
        ListExpr list;
        list.items.reserve(body.size());
        for (const auto& child : body) list.items.push_back(parse_body(child));
        return Expression(std::move(list));
    }
    return Expression(body);
}

Json serialize_body(const Expression& body) {
    struct Visitor {
        Json operator()(const Json& atomic) const {
            if (atomic.is_string()) return escape_literal(atomic.get_ref<const std::string&>(), false);
            return atomic;
        }
        Json operator()(const ObjectExpr& obj) const {
            Json out = Json::object();
            for (std::size_t i = 0; i < obj.keys.size(); ++i) out[obj.keys[i]] = serialize_body(obj.values[i]);
            return out;
        }
        Json operator()(const ListExpr& list) const {
            Json out = Json::array();
            for (const auto& item : list.items) out.push_back(serialize_body(item));
            return out;
        }
        Json operator()(const VariableRef& ref) const { return "[" + ref.name + "]"; }
        Json operator()(const InterpolatedString& s) const { return serialize_segments(s.segments); }
        Json operator()(const Conditional& c) const {
            Json spec = Json::object();
            spec["query"] = c.query.source();
            if (c.then_branch) spec["true"] = serialize_body(*c.then_branch);
            if (c.else_branch) spec["false"] = serialize_body(*c.else_branch);
            Json out = Json::object();
            out[std::string(kCondKey)] = std::move(spec);
            return out;
        }
    };
    return std::visit(Visitor{}, body.node());
}

ArgumentValue argument_from_json(const Json& value) {
    if (is_atomic(value)) return ArgumentValue(value);
    if (value.is_array()) {
        std::vector<std::string> list;
        for (const auto& item : value) {
            if (!item.is_string()) throw Error(ErrorCode::BadSettingsShape, "list arguments must contain only strings");
            list.push_back(item.get<std::string>());
        }
        return ArgumentValue(std::move(list));
    }
    throw Error(ErrorCode::BadSettingsShape, "argument values must be atomic or a list of strings");
}

Parameter parameter_from_json(const Json& doc) {
    if (!doc.is_object()) bad_param("each parameter must be an object");
    std::string name = doc.contains("name") && doc.at("name").is_string() ? doc.at("name").get<std::string>() : "";
    if (!is_identifier(name)) bad_param("parameter name must be an identifier, got " + doc.value("name", Json()).dump());
    check_keys(doc, {"name", "type", "config", "displayPredicate", "defaultValue"}, "parameter '" + name + "'");
    if (!doc.contains("type") || !doc.at("type").is_string()) bad_param("parameter '" + name + "': missing type");

    Parameter p;
    p.name = name;
    p.type = param_type_from_json(doc.at("type").get<std::string>(), doc.value("config", Json::object()), name);
    if (doc.contains("displayPredicate")) {
        if (!doc.at("displayPredicate").is_string()) bad_param("parameter '" + name + "': displayPredicate must be a string");
        p.display_predicate = Predicate::parse(doc.at("displayPredicate").get<std::string>());
    }
    if (doc.contains("defaultValue")) {
        try {
            p.default_value = argument_from_json(doc.at("defaultValue"));
        } catch (const Error& e) {
            bad_param("parameter '" + name + "': " + e.what());
        }
    }
    return p;
}

Json parameter_to_json(const Parameter& p) {
    Json out = Json::object();
    out["name"] = p.name;
    out["type"] = std::string(type_name(p.type));
    out["config"] = param_config_to_json(p.type);
    if (p.display_predicate) out["displayPredicate"] = p.display_predicate->source();
    if (p.default_value) out["defaultValue"] = p.default_value->to_json();
    return out;
}

Template template_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::BadTemplateShape, "template document must be a JSON object");
    static const std::set<std::string> known = {"name", "description", "language", "params", "symbols", "body", "metadata", "version"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw Error(ErrorCode::UnknownTopLevelKey, "unknown top-level key \"" + key + "\"", {{"key", key}});
        }
    }
    for (const char* key : {"name", "description", "language", "params", "symbols", "body"}) {
        if (!doc.contains(key)) throw Error(ErrorCode::BadTemplateShape, std::string("template is missing \"") + key + "\"");
    }

    Template t;
    t.name = required_string(doc, "name", ErrorCode::BadTemplateShape, "template");
    t.description = required_string(doc, "description", ErrorCode::BadTemplateShape, "template");
    t.language = required_string(doc, "language", ErrorCode::BadTemplateShape, "template");

    if (!doc.at("params").is_array()) throw Error(ErrorCode::BadTemplateShape, "\"params\" must be a list");
    for (const auto& p : doc.at("params")) t.params.push_back(parameter_from_json(p));

    if (!doc.at("symbols").is_array()) throw Error(ErrorCode::BadTemplateShape, "\"symbols\" must be a list");
    for (const auto& s : doc.at("symbols")) {
        if (!s.is_object() || !s.contains("name") || !s.at("name").is_string() || !is_identifier(s.at("name").get<std::string>())) {
            throw Error(ErrorCode::BadTemplateShape, "each symbol needs an identifier \"name\"");
        }
        for (const auto& [key, value] : s.items()) {
            if (key != "name" && key != "description") {
                throw Error(ErrorCode::BadTemplateShape, "symbol has unexpected key \"" + key + "\"");
            }
        }
        if (s.contains("description") && !s.at("description").is_string()) {
            throw Error(ErrorCode::BadTemplateShape, "symbol description must be a string");
        }
        t.symbols.push_back({s.at("name").get<std::string>(), s.value("description", std::string())});
    }

    t.body = parse_body(doc.at("body"));

    if (doc.contains("metadata")) {
        const Json& md = doc.at("metadata");
        if (!md.is_object()) throw Error(ErrorCode::BadTemplateShape, "\"metadata\" must be an object");
        for (const auto& [key, value] : md.items()) {
            if (!value.is_string()) throw Error(ErrorCode::BadTemplateShape, "metadata values must be strings");
            t.metadata.emplace_back(key, value.get<std::string>());
        }
    }
    if (doc.contains("version")) {
        const Json& v = doc.at("version");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw Error(ErrorCode::BadTemplateShape, "\"version\" must be a non-negative integer");
        }
        t.version = v.get<std::uint64_t>();
    }
    return t;
}

Template parse_template(std::string_view text) {
    return template_from_json(parse_json(text));
}

Json template_to_json(const Template& t) {
    Json doc = Json::object();
    doc["name"] = t.name;
    doc["description"] = t.description;
    doc["language"] = t.language;
    doc["params"] = Json::array();
    for (const auto& p : t.params) doc["params"].push_back(parameter_to_json(p));
    doc["symbols"] = Json::array();
    for (const auto& s : t.symbols) doc["symbols"].push_back(Json{{"name", s.name}, {"description", s.description}});
    doc["body"] = serialize_body(t.body);
    Json md = Json::object();
    for (const auto& [key, value] : t.metadata) md[key] = value;
    doc["metadata"] = std::move(md);
    doc["version"] = t.version;
    return doc;
}

std::string serialize_template(const Template& t) {
    return canonical(template_to_json(t)) + "\n";
}

Filter filter_from_json(const Json& doc) {
    auto bad = [](const std::string& msg) { return Error(ErrorCode::BadFilterShape, msg); };
    if (!doc.is_object()) throw bad("filter must be an object");
    if (!doc.contains("column") || !doc.at("column").is_string()) throw bad("filter needs a string \"column\"");
    if (!doc.contains("kind") || !doc.at("kind").is_string()) throw bad("filter needs a \"kind\"");
    Filter f;
    f.column = doc.at("column").get<std::string>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "range") {
        for (const auto& [key, value] : doc.items()) {
            if (key != "column" && key != "kind" && key != "min" && key != "max") throw bad("range filter has unexpected key \"" + key + "\"");
        }
        if (!doc.contains("min") || !doc.at("min").is_number() || !doc.contains("max") || !doc.at("max").is_number()) {
            throw bad("range filter needs numeric \"min\" and \"max\"");
        }
        RangeFilter r{doc.at("min").get<double>(), doc.at("max").get<double>()};
        if (r.min > r.max) throw bad("range filter min exceeds max");
        f.kind = r;
    } else if (kind == "oneOf") {
        for (const auto& [key, value] : doc.items()) {
            if (key != "column" && key != "kind" && key != "values") throw bad("oneOf filter has unexpected key \"" + key + "\"");
        }
        if (!doc.contains("values") || !doc.at("values").is_array()) throw bad("oneOf filter needs a \"values\" list");
        OneOfFilter o;
        for (const auto& v : doc.at("values")) {
            if (!is_atomic(v)) throw bad("oneOf values must be atomic");
            o.values.push_back(v);
        }
        f.kind = std::move(o);
    } else {
        throw bad("unknown filter kind \"" + kind + "\"");
    }
    return f;
}

Json filter_to_json(const Filter& f) {
    Json out = Json::object();
    out["column"] = f.column;
    if (const auto* r = std::get_if<RangeFilter>(&f.kind)) {
        out["kind"] = "range";
        auto num = [](double x) {
            double ip = 0;
            if (std::modf(x, &ip) == 0.0 && std::fabs(x) < 9.0e15) return Json(static_cast<std::int64_t>(x));
            return Json(x);
        };
        out["min"] = num(r->min);
        out["max"] = num(r->max);
    } else {
        out["kind"] = "oneOf";
        out["values"] = Json(std::get<OneOfFilter>(f.kind).values);
    }
    return out;
}

Settings settings_from_json(const Json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::BadSettingsShape, "settings must be a JSON object");
    Settings s;
    for (const auto& [key, value] : doc.items()) {
        if (key == kFiltersKey) {
            if (!value.is_array()) throw Error(ErrorCode::BadFilterShape, "\"$filters\" must be a list");
            std::vector<Filter> filters;
            for (const auto& f : value) filters.push_back(filter_from_json(f));
            s.filters = std::move(filters);
            continue;
        }
        s.set(key, argument_from_json(value));
    }
    return s;
}

Settings parse_settings(std::string_view text) {
    return settings_from_json(parse_json(text));
}

Json settings_to_json(const Settings& s) {
    Json out = Json::object();
    for (const auto& [key, value] : s.entries()) out[key] = value.to_json();
    if (s.filters) {
        Json list = Json::array();
        for (const auto& f : *s.filters) list.push_back(filter_to_json(f));
        out[std::string(kFiltersKey)] = std::move(list);
    }
    return out;
}

std::string serialize_settings(const Settings& s) {
    return canonical(settings_to_json(s)) + "\n";
}

std::string canonical_document(std::string_view text) {
    return canonical(parse_json(text)) + "\n";
}

}  // namespace ivy
