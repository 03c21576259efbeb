#pragma once

#include "ivy/json.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ivy {

// Closed boolean expression language used by conditionals and parameter
// display predicates:
//
//   expr    := or
//   or      := and ( "||" and )*
//   and     := unary ( "&&" unary )*
//   unary   := "!" unary | compare
//   compare := operand ( ("=="|"!="|"<"|"<="|">"|">=") operand
//                      | "in" "[" literal ("," literal)* "]" )?
//   operand := literal | identifier | "(" expr ")"
//   literal := number | 'text' | "text" | true | false | null
//
// Evaluation is total. Unknown identifiers read as null, null supports only
// == and !=, ordered comparisons across types (or with null) are false, and a
// bare operand is tested for JavaScript-style truthiness.
struct PredicateNode;
using PredicateNodePtr = std::shared_ptr<const PredicateNode>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct PredicateNode {
    struct Literal { Json value; };
    struct Identifier { std::string name; };
    struct Not { PredicateNodePtr operand; };
    struct And { PredicateNodePtr lhs, rhs; };
    struct Or { PredicateNodePtr lhs, rhs; };
    struct Compare { CompareOp op; PredicateNodePtr lhs, rhs; };
    struct In { PredicateNodePtr operand; std::vector<Json> options; };

    std::variant<Literal, Identifier, Not, And, Or, Compare, In> node;
};

class Predicate {
public:
    /// Throws ivy::Error(BadPredicate) with `detail.position` (byte offset).
    static Predicate parse(std::string_view source);

    Predicate(std::string source, PredicateNodePtr root)
        : source_(std::move(source)), root_(std::move(root)) {}

    const std::string& source() const noexcept { return source_; }
    const PredicateNodePtr& root() const noexcept { return root_; }

    /// Identifiers mentioned anywhere in the predicate, first-seen order.
    std::vector<std::string> identifiers() const;

    using Lookup = std::function<Json(const std::string&)>;
    bool evaluate(const Lookup& lookup) const;

    /// Replaces every identifier with the literal `lookup` returns for it. The
    /// source text is kept for diagnostics.
    Predicate bind(const Lookup& lookup) const;

    friend bool operator==(const Predicate& a, const Predicate& b) { return a.source_ == b.source_; }

private:
    std::string source_;
    PredicateNodePtr root_;
};

/// Equality as the predicate language sees it: numbers compare by value,
/// otherwise types must agree.
bool predicate_equal(const Json& a, const Json& b);
bool truthy(const Json& value);

}  // namespace ivy
