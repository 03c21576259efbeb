#pragma once

#include "ivy/json.hpp"
#include "ivy/predicate.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ivy {

class Expression;
using ExpressionPtr = std::shared_ptr<const Expression>;

struct VariableRef {
    std::string name;
    friend bool operator==(const VariableRef&, const VariableRef&) = default;
};

/// One piece of an interpolated string: literal text or a bracketed reference.
using Segment = std::variant<std::string, VariableRef>;

struct InterpolatedString {
    std::vector<Segment> segments;
    friend bool operator==(const InterpolatedString&, const InterpolatedString&) = default;
};

struct ObjectExpr {
    std::vector<std::string> keys;
    std::vector<Expression> values;
};

struct ListExpr {
    std::vector<Expression> items;
};

/// `$cond`: at least one of the branches is non-null.
struct Conditional {
    Predicate query;
    ExpressionPtr then_branch;
    ExpressionPtr else_branch;
};

/// Template body node. Atomic holds a JSON string, number, boolean or null.
class Expression {
public:
    using Node = std::variant<Json, ObjectExpr, ListExpr, VariableRef, InterpolatedString, Conditional>;

    Expression() : node_(Json(nullptr)) {}
    Expression(Node node) : node_(std::move(node)) {}

    const Node& node() const noexcept { return node_; }

    template <typename T>
    const T* as() const noexcept { return std::get_if<T>(&node_); }

    bool is_atomic() const noexcept { return std::holds_alternative<Json>(node_); }

    /// Plain JSON (no variables, no conditionals) lifted into an expression
    /// without bracket scanning. Used for already-evaluated specs.
    static Expression from_json(const Json& value);

    friend bool operator==(const Expression& a, const Expression& b);

private:
    Node node_;
};

bool operator==(const ObjectExpr& a, const ObjectExpr& b);
bool operator==(const ListExpr& a, const ListExpr& b);
bool operator==(const Conditional& a, const Conditional& b);

/// Names referenced from the body: bracket references and the identifiers of
/// every conditional predicate, first-seen order, duplicates removed.
std::vector<std::string> referenced_names(const Expression& body);

/// Resolves an RFC 6901 pointer through object and list nodes only (never
/// through conditionals). Returns nullptr when the path does not resolve.
const Expression* resolve_pointer(const Expression& root, std::string_view pointer);

/// Returns a copy of `root` with the node at `pointer` replaced.
/// Throws ivy::Error(PointerUnresolvable) when the path does not resolve.
Expression replace_at_pointer(const Expression& root, std::string_view pointer, Expression replacement);

}  // namespace ivy
