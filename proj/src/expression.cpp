#include "ivy/expression.hpp"

#include "ivy/error.hpp"

#include <algorithm>
#include <charconv>

namespace ivy {

namespace {

bool same_ptr_value(const ExpressionPtr& a, const ExpressionPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

void add_unique(std::vector<std::string>& out, const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}

void collect(const Expression& e, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VariableRef>) {
                add_unique(out, n.name);
            } else if constexpr (std::is_same_v<T, InterpolatedString>) {
                for (const auto& seg : n.segments) {
                    if (const auto* ref = std::get_if<VariableRef>(&seg)) add_unique(out, ref->name);
                }
            } else if constexpr (std::is_same_v<T, ObjectExpr>) {
                for (const auto& v : n.values) collect(v, out);
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                for (const auto& v : n.items) collect(v, out);
            } else if constexpr (std::is_same_v<T, Conditional>) {
                for (const auto& id : n.query.identifiers()) add_unique(out, id);
                if (n.then_branch) collect(*n.then_branch, out);
                if (n.else_branch) collect(*n.else_branch, out);
            }
        },
        e.node());
}

std::vector<std::string> split_pointer(std::string_view pointer) {
    std::vector<std::string> tokens;
    if (pointer.empty()) return tokens;
    if (pointer.front() != '/') {
        throw Error(ErrorCode::PointerUnresolvable, "JSON pointer must start with '/': " + std::string(pointer));
    }
    std::string cur;
    for (std::size_t i = 1; i <= pointer.size(); ++i) {
        if (i == pointer.size() || pointer[i] == '/') {
            tokens.push_back(cur);
            cur.clear();
            continue;
        }
        if (pointer[i] == '~' && i + 1 < pointer.size() && (pointer[i + 1] == '0' || pointer[i + 1] == '1')) {
            cur += pointer[i + 1] == '0' ? '~' : '/';
            ++i;
        } else {
            cur += pointer[i];
        }
    }
    return tokens;
}

std::optional<std::size_t> list_index(const std::string& token) {
    if (token.empty() || (token.size() > 1 && token[0] == '0')) return std::nullopt;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
    return idx;
}

const Expression* step(const Expression& e, const std::string& token) {
    if (const auto* obj = e.as<ObjectExpr>()) {
        for (std::size_t i = 0; i < obj->keys.size(); ++i) {
            if (obj->keys[i] == token) return &obj->values[i];
        }
        return nullptr;
    }
    if (const auto* list = e.as<ListExpr>()) {
        auto idx = list_index(token);
        if (!idx || *idx >= list->items.size()) return nullptr;
        return &list->items[*idx];
    }
    return nullptr;
}

Expression replace_rec(const Expression& e, const std::vector<std::string>& tokens, std::size_t depth,
                       Expression& replacement, std::string_view pointer) {
    if (depth == tokens.size()) return std::move(replacement);
    const std::string& token = tokens[depth];
    if (const auto* obj = e.as<ObjectExpr>()) {
        ObjectExpr copy = *obj;
        for (std::size_t i = 0; i < copy.keys.size(); ++i) {
            if (copy.keys[i] == token) {
                copy.values[i] = replace_rec(obj->values[i], tokens, depth + 1, replacement, pointer);
                return Expression(std::move(copy));
            }
        }
    } else if (const auto* list = e.as<ListExpr>()) {
        auto idx = list_index(token);
        if (idx && *idx < list->items.size()) {
            ListExpr copy = *list;
            copy.items[*idx] = replace_rec(list->items[*idx], tokens, depth + 1, replacement, pointer);
            return Expression(std::move(copy));
        }
    }
    throw Error(ErrorCode::PointerUnresolvable, "pointer does not resolve: " + std::string(pointer),
                {{"pointer", std::string(pointer)}});
}

}  // namespace

Expression Expression::from_json(const Json& value) {
    if (value.is_object()) {
        ObjectExpr obj;
        for (const auto& [key, child] : value.items()) {
            obj.keys.push_back(key);
            obj.values.push_back(from_json(child));
        }
        return Expression(std::move(obj));
    }
    if (value.is_array()) {
        ListExpr list;
        for (const auto& child : value) list.items.push_back(from_json(child));
        return Expression(std::move(list));
    }
    return Expression(value);
}

bool operator==(const ObjectExpr& a, const ObjectExpr& b) {
    return a.keys == b.keys && a.values == b.values;
}

bool operator==(const ListExpr& a, const ListExpr& b) {
    return a.items == b.items;
}

bool operator==(const Conditional& a, const Conditional& b) {
    return a.query == b.query && same_ptr_value(a.then_branch, b.then_branch) &&
           same_ptr_value(a.else_branch, b.else_branch);
}

bool operator==(const Expression& a, const Expression& b) {
    return a.node_ == b.node_;
}

std::vector<std::string> referenced_names(const Expression& body) {
    std::vector<std::string> out;
    collect(body, out);
    return out;
}

const Expression* resolve_pointer(const Expression& root, std::string_view pointer) {
    const Expression* cur = &root;
    for (const auto& token : split_pointer(pointer)) {
        cur = step(*cur, token);
        if (!cur) return nullptr;
    }
    return cur;
}

Expression replace_at_pointer(const Expression& root, std::string_view pointer, Expression replacement) {
    auto tokens = split_pointer(pointer);
    return replace_rec(root, tokens, 0, replacement, pointer);
}

}  // namespace ivy
