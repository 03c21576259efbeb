#include "ivy/schema.hpp"

#include "ivy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ivy {

namespace {

constexpr int kMaxDepth = 512;

std::string decode_token(const std::string& raw) {
    std::string pct;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '%' && i + 2 < raw.size() && std::isxdigit(static_cast<unsigned char>(raw[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(raw[i + 2]))) {
            pct += static_cast<char>(std::stoi(raw.substr(i + 1, 2), nullptr, 16));
            i += 2;
        } else {
            pct += raw[i];
        }
    }
    std::string out;
    for (std::size_t i = 0; i < pct.size(); ++i) {
        if (pct[i] == '~' && i + 1 < pct.size() && (pct[i + 1] == '0' || pct[i + 1] == '1')) {
            out += pct[i + 1] == '0' ? '~' : '/';
            ++i;
        } else {
            out += pct[i];
        }
    }
    return out;
}

const Json* resolve_local(const Json& root, const std::string& ref) {
    if (ref.empty() || ref[0] != '#') return nullptr;
    const Json* cur = &root;
    std::string_view rest(ref);
    rest.remove_prefix(1);
    if (rest.empty()) return cur;
    if (rest.front() != '/') return nullptr;
    rest.remove_prefix(1);
    while (true) {
        auto slash = rest.find('/');
        std::string token = decode_token(std::string(rest.substr(0, slash)));
        if (cur->is_object()) {
            auto it = cur->find(token);
            if (it == cur->end()) return nullptr;
            cur = &*it;
        } else if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(token);
            } catch (...) {
                return nullptr;
            }
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else {
            return nullptr;
        }
        if (slash == std::string_view::npos) return cur;
        rest.remove_prefix(slash + 1);
    }
}

bool type_matches(const std::string& type, const Json& v) {
    if (type == "null") return v.is_null();
    if (type == "boolean") return v.is_boolean();
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "number") return v.is_number();
    if (type == "integer") {
        if (v.is_number_integer() || v.is_number_unsigned()) return true;
        if (v.is_number_float()) {
            double d = v.get<double>();
            return std::floor(d) == d;
        }
        return false;
    }
    return false;
}

std::size_t utf8_length(const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string child_path(const std::string& path, const std::string& token) {
    return path + "/" + pointer_escape(token);
}

std::size_t depth_of(const std::string& pointer) {
    return static_cast<std::size_t>(std::count(pointer.begin(), pointer.end(), '/'));
}

}  // namespace

Json schema_errors_to_json(const std::vector<SchemaError>& errors) {
    Json out = Json::array();
    for (const auto& e : errors) out.push_back(Json{{"pointer", e.pointer}, {"keyword", e.keyword}, {"message", e.message}});
    return out;
}

SchemaValidator::SchemaValidator(Json schema) : schema_(std::make_shared<const Json>(std::move(schema))) {
    prepare(*schema_, "#");
}

void SchemaValidator::prepare(const Json& schema, const std::string& where) {
    if (!schema.is_object()) return;
    auto compile = [&](const std::string& src) {
        if (patterns_.count(src)) return;
        try {
            patterns_.emplace(src, std::regex(src, std::regex::ECMAScript));
        } catch (const std::regex_error&) {
            throw Error(ErrorCode::BadSchema, "pattern does not compile at " + where + ": " + src);
        }
    };
    for (const auto& [key, value] : schema.items()) {
        std::string here = where + "/" + pointer_escape(key);
        if (key == "$ref") {
            if (!value.is_string()) throw Error(ErrorCode::BadSchema, "$ref must be a string at " + where);
            const auto& ref = value.get_ref<const std::string&>();
            if (!refs_.count(ref)) {
                const Json* target = resolve_local(*schema_, ref);
                if (!target) throw Error(ErrorCode::BadSchema, "unresolvable $ref \"" + ref + "\" at " + where, {{"ref", ref}});
                refs_.emplace(ref, target);
            }
        } else if (key == "pattern") {
            if (value.is_string()) compile(value.get<std::string>());
        } else if (key == "properties" || key == "definitions" || key == "patternProperties" || key == "dependencies") {
            if (!value.is_object()) continue;
            for (const auto& [name, sub] : value.items()) {
                if (key == "patternProperties") compile(name);
                prepare(sub, here + "/" + pointer_escape(name));
            }
        } else if (key == "enum" || key == "const" || key == "default" || key == "examples") {
            continue;
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) prepare(value[i], here + "/" + std::to_string(i));
        } else {
            prepare(value, here);
        }
    }
}

bool SchemaValidator::search(const std::string& pattern, const std::string& text) const {
    if (auto it = patterns_.find(pattern); it != patterns_.end()) return std::regex_search(text, it->second);
    try {
        return std::regex_search(text, std::regex(pattern, std::regex::ECMAScript));
    } catch (const std::regex_error&) {
        return false;
    }
}

std::vector<SchemaError> SchemaValidator::validate(const Json& instance) const {
    std::vector<SchemaError> errors;
    check(*schema_, instance, "", &errors, 0);
    return errors;
}

bool SchemaValidator::accepts(const Json& instance) const {
    return check(*schema_, instance, "", nullptr, 0);
}

bool SchemaValidator::check(const Json& schema, const Json& v, const std::string& path, std::vector<SchemaError>* errors,
                            int depth) const {
    if (schema.is_boolean()) {
        if (schema.get<bool>()) return true;
        if (errors) errors->push_back({path, "false", "no value is allowed here"});
        return false;
    }
    if (!schema.is_object()) return true;
    if (depth > kMaxDepth) {
        if (errors) errors->push_back({path, "$ref", "schema recursion too deep"});
        return false;
    }

    if (auto it = schema.find("$ref"); it != schema.end() && it->is_string()) {
        const auto& ref = it->get_ref<const std::string&>();
        auto cached = refs_.find(ref);
        const Json* target = cached != refs_.end() ? cached->second : resolve_local(*schema_, ref);
        if (!target) {
            if (errors) errors->push_back({path, "$ref", "unresolvable reference " + ref});
            return false;
        }
        return check(*target, v, path, errors, depth + 1);
    }

    bool ok = true;
    auto fail = [&](const std::string& p, const char* keyword, std::string message) {
        ok = false;
        if (errors) errors->push_back({p, keyword, std::move(message)});
    };
#define IVY_BAIL_IF_FAST() \
    if (!ok && !errors) return false

    if (auto it = schema.find("type"); it != schema.end()) {
        bool match = false;
        if (it->is_string()) {
            match = type_matches(it->get<std::string>(), v);
        } else if (it->is_array()) {
            for (const auto& t : *it) match = match || (t.is_string() && type_matches(t.get<std::string>(), v));
        }
        if (!match) fail(path, "type", "expected type " + it->dump() + ", got " + std::string(v.type_name()));
        IVY_BAIL_IF_FAST();
    }
    if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
        if (std::find(it->begin(), it->end(), v) == it->end()) fail(path, "enum", "value " + v.dump() + " is not one of " + it->dump());
        IVY_BAIL_IF_FAST();
    }
    if (auto it = schema.find("const"); it != schema.end()) {
        if (*it != v) fail(path, "const", "expected " + it->dump());
        IVY_BAIL_IF_FAST();
    }

    if (v.is_number()) {
        double x = v.get<double>();
        if (auto it = schema.find("minimum"); it != schema.end() && it->is_number() && x < it->get<double>()) {
            fail(path, "minimum", "value below minimum " + it->dump());
        }
        if (auto it = schema.find("maximum"); it != schema.end() && it->is_number() && x > it->get<double>()) {
            fail(path, "maximum", "value above maximum " + it->dump());
        }
        if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && it->is_number() && x <= it->get<double>()) {
            fail(path, "exclusiveMinimum", "value not above " + it->dump());
        }
        if (auto it = schema.find("exclusiveMaximum"); it != schema.end() && it->is_number() && x >= it->get<double>()) {
            fail(path, "exclusiveMaximum", "value not below " + it->dump());
        }
        if (auto it = schema.find("multipleOf"); it != schema.end() && it->is_number()) {
            double q = x / it->get<double>();
            if (std::fabs(q - std::round(q)) > 1e-9) fail(path, "multipleOf", "value is not a multiple of " + it->dump());
        }
        IVY_BAIL_IF_FAST();
    }

    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (auto it = schema.find("minLength"); it != schema.end() && it->is_number() && utf8_length(s) < it->get<std::size_t>()) {
            fail(path, "minLength", "string shorter than " + it->dump());
        }
        if (auto it = schema.find("maxLength"); it != schema.end() && it->is_number() && utf8_length(s) > it->get<std::size_t>()) {
            fail(path, "maxLength", "string longer than " + it->dump());
        }
        if (auto it = schema.find("pattern"); it != schema.end() && it->is_string()) {
            if (!search(it->get<std::string>(), s)) fail(path, "pattern", "string does not match " + it->dump());
        }
        IVY_BAIL_IF_FAST();
    }

    if (v.is_array()) {
        if (auto it = schema.find("items"); it != schema.end()) {
            if (it->is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    std::string p = path + "/" + std::to_string(i);
                    if (i < it->size()) {
                        if (!check((*it)[i], v[i], p, errors, depth + 1)) ok = false;
                    } else if (auto add = schema.find("additionalItems"); add != schema.end()) {
                        if (!check(*add, v[i], p, errors, depth + 1)) ok = false;
                    }
                    IVY_BAIL_IF_FAST();
                }
            } else {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (!check(*it, v[i], path + "/" + std::to_string(i), errors, depth + 1)) ok = false;
                    IVY_BAIL_IF_FAST();
                }
            }
        }
        if (auto it = schema.find("minItems"); it != schema.end() && it->is_number() && v.size() < it->get<std::size_t>()) {
            fail(path, "minItems", "fewer than " + it->dump() + " items");
        }
        if (auto it = schema.find("maxItems"); it != schema.end() && it->is_number() && v.size() > it->get<std::size_t>()) {
            fail(path, "maxItems", "more than " + it->dump() + " items");
        }
        if (auto it = schema.find("uniqueItems"); it != schema.end() && it->is_boolean() && it->get<bool>()) {
            for (std::size_t i = 0; i < v.size() && ok; ++i) {
                for (std::size_t j = i + 1; j < v.size(); ++j) {
                    if (v[i] == v[j]) {
                        fail(path, "uniqueItems", "items " + std::to_string(i) + " and " + std::to_string(j) + " are equal");
                        break;
                    }
                }
            }
        }
        if (auto it = schema.find("contains"); it != schema.end()) {
            bool any = std::any_of(v.begin(), v.end(), [&](const Json& item) { return check(*it, item, path, nullptr, depth + 1); });
            if (!any) fail(path, "contains", "no item matches the contains schema");
        }
        IVY_BAIL_IF_FAST();
    }

    if (v.is_object()) {
        if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
            for (const auto& name : *it) {
                if (name.is_string() && !v.contains(name.get<std::string>())) {
                    fail(path, "required", "missing required property \"" + name.get<std::string>() + "\"");
                }
            }
            IVY_BAIL_IF_FAST();
        }
        if (auto it = schema.find("minProperties"); it != schema.end() && it->is_number() && v.size() < it->get<std::size_t>()) {
            fail(path, "minProperties", "fewer than " + it->dump() + " properties");
        }
        if (auto it = schema.find("maxProperties"); it != schema.end() && it->is_number() && v.size() > it->get<std::size_t>()) {
            fail(path, "maxProperties", "more than " + it->dump() + " properties");
        }
        IVY_BAIL_IF_FAST();

        auto props = schema.find("properties");
        auto pattern_props = schema.find("patternProperties");
        auto additional = schema.find("additionalProperties");
        auto names = schema.find("propertyNames");
        for (const auto& [key, child] : v.items()) {
            std::string p = child_path(path, key);
            bool covered = false;
            if (props != schema.end() && props->is_object()) {
                if (auto sub = props->find(key); sub != props->end()) {
                    covered = true;
                    if (!check(*sub, child, p, errors, depth + 1)) ok = false;
                }
            }
            if (pattern_props != schema.end() && pattern_props->is_object()) {
                for (const auto& [src, sub] : pattern_props->items()) {
                    if (search(src, key)) {
                        covered = true;
                        if (!check(sub, child, p, errors, depth + 1)) ok = false;
                    }
                }
            }
            if (!covered && additional != schema.end()) {
                if (additional->is_boolean() && !additional->get<bool>()) {
                    fail(p, "additionalProperties", "property \"" + key + "\" is not allowed");
                } else if (!check(*additional, child, p, errors, depth + 1)) {
                    ok = false;
                }
            }
            if (names != schema.end() && !check(*names, Json(key), p, errors, depth + 1)) ok = false;
            IVY_BAIL_IF_FAST();
        }

        if (auto it = schema.find("dependencies"); it != schema.end() && it->is_object()) {
            for (const auto& [key, dep] : it->items()) {
                if (!v.contains(key)) continue;
                if (dep.is_array()) {
                    for (const auto& other : dep) {
                        if (other.is_string() && !v.contains(other.get<std::string>())) {
                            fail(path, "dependencies", "\"" + key + "\" requires \"" + other.get<std::string>() + "\"");
                        }
                    }
                } else if (!check(dep, v, path, errors, depth + 1)) {
                    ok = false;
                }
            }
            IVY_BAIL_IF_FAST();
        }
    }

    if (auto it = schema.find("allOf"); it != schema.end() && it->is_array()) {
        for (const auto& sub : *it) {
            if (!check(sub, v, path, errors, depth + 1)) ok = false;
            IVY_BAIL_IF_FAST();
        }
    }

    auto best_branch_errors = [&](const Json& alternatives) {
        std::vector<SchemaError> best;
        std::size_t best_depth = 0;
        bool have = false;
        for (const auto& sub : alternatives) {
            std::vector<SchemaError> errs;
            check(sub, v, path, &errs, depth + 1);
            std::size_t deepest = 0;
            for (const auto& e : errs) deepest = std::max(deepest, depth_of(e.pointer));
            if (!have || deepest > best_depth || (deepest == best_depth && errs.size() < best.size())) {
                best = std::move(errs);
                best_depth = deepest;
                have = true;
            }
        }
        return best;
    };

    if (auto it = schema.find("anyOf"); it != schema.end() && it->is_array()) {
        bool any = std::any_of(it->begin(), it->end(), [&](const Json& sub) { return check(sub, v, path, nullptr, depth + 1); });
        if (!any) {
            fail(path, "anyOf", "value matches none of " + std::to_string(it->size()) + " alternatives");
            if (errors) {
                auto nested = best_branch_errors(*it);
                errors->insert(errors->end(), nested.begin(), nested.end());
            }
        }
        IVY_BAIL_IF_FAST();
    }

    if (auto it = schema.find("oneOf"); it != schema.end() && it->is_array()) {
        std::size_t matches = 0;
        for (const auto& sub : *it) {
            if (check(sub, v, path, nullptr, depth + 1)) ++matches;
        }
        if (matches != 1) {
            fail(path, "oneOf", "value matches " + std::to_string(matches) + " of " + std::to_string(it->size()) +
                                    " alternatives, expected exactly one");
            if (errors && matches == 0) {
                auto nested = best_branch_errors(*it);
                errors->insert(errors->end(), nested.begin(), nested.end());
            }
        }
        IVY_BAIL_IF_FAST();
    }

    if (auto it = schema.find("not"); it != schema.end()) {
        if (check(*it, v, path, nullptr, depth + 1)) fail(path, "not", "value matches a forbidden schema");
        IVY_BAIL_IF_FAST();
    }

    if (auto it = schema.find("if"); it != schema.end()) {
        if (check(*it, v, path, nullptr, depth + 1)) {
            if (auto then = schema.find("then"); then != schema.end() && !check(*then, v, path, errors, depth + 1)) ok = false;
        } else if (auto otherwise = schema.find("else"); otherwise != schema.end() && !check(*otherwise, v, path, errors, depth + 1)) {
            ok = false;
        }
    }
#undef IVY_BAIL_IF_FAST
    return ok;
}

}  // namespace ivy
