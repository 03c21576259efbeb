#include "ivy/predicate.hpp"

#include "ivy/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace ivy {

namespace {

enum class Tok {
    End, Ident, Number, String, True, False, Null, In,
    EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr, Bang, LParen, RParen, LBracket, RBracket, Comma,
};

struct Token {
    Tok kind = Tok::End;
    std::size_t pos = 0;
    std::string text;
    Json value;
};

[[noreturn]] void fail(std::size_t pos, const std::string& msg, std::string_view source) {
    throw Error(ErrorCode::BadPredicate, "predicate \"" + std::string(source) + "\": " + msg + " at offset " + std::to_string(pos),
                {{"position", pos}, {"source", std::string(source)}});
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.pos = i_;
            if (i_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(std::move(t));
                return out;
            }
            char c = src_[i_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = i_;
                while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) ++i_;
                t.text = std::string(src_.substr(start, i_ - start));
                if (t.text == "true") {
                    t.kind = Tok::True;
                } else if (t.text == "false") {
                    t.kind = Tok::False;
                } else if (t.text == "null") {
                    t.kind = Tok::Null;
                } else if (t.text == "in") {
                    t.kind = Tok::In;
                } else {
                    t.kind = Tok::Ident;
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
                lex_number(t);
            } else if (c == '\'' || c == '"') {
                lex_string(t, c);
            } else {
                lex_operator(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void skip_space() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    }

    void lex_number(Token& t) {
        std::size_t start = i_;
        if (src_[i_] == '-') ++i_;
        bool digits = false;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) { ++i_; digits = true; }
        bool is_float = false;
        if (i_ < src_.size() && src_[i_] == '.') {
            is_float = true;
            ++i_;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) { ++i_; digits = true; }
        }
        if (!digits) fail(start, "malformed number", src_);
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            is_float = true;
            ++i_;
            if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
            std::size_t exp_start = i_;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
            if (exp_start == i_) fail(start, "malformed exponent", src_);
        }
        std::string text(src_.substr(start, i_ - start));
        t.kind = Tok::Number;
        t.text = text;
        if (!is_float) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec == std::errc() && ptr == text.data() + text.size()) {
                t.value = v;
                return;
            }
        }
        char* end = nullptr;
        double d = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(d)) fail(start, "number out of range", src_);
        t.value = d;
    }

    void lex_string(Token& t, char quote) {
        std::size_t start = i_;
        ++i_;
        std::string out;
        while (true) {
            if (i_ >= src_.size()) fail(start, "unterminated string", src_);
            char c = src_[i_++];
            if (c == quote) break;
            if (c == '\\') {
                if (i_ >= src_.size()) fail(start, "unterminated string", src_);
                char e = src_[i_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '\\': out += '\\'; break;
                    case '\'': out += '\''; break;
                    case '"': out += '"'; break;
                    default: fail(i_ - 2, "unknown escape", src_);
                }
            } else {
                out += c;
            }
        }
        t.kind = Tok::String;
        t.value = out;
    }

    void lex_operator(Token& t) {
        auto two = [&](std::string_view op) { return src_.substr(i_, 2) == op; };
        char c = src_[i_];
        if (two("==")) { t.kind = Tok::EqEq; i_ += 2; return; }
        if (two("!=")) { t.kind = Tok::NotEq; i_ += 2; return; }
        if (two("<=")) { t.kind = Tok::Le; i_ += 2; return; }
        if (two(">=")) { t.kind = Tok::Ge; i_ += 2; return; }
        if (two("&&")) { t.kind = Tok::AndAnd; i_ += 2; return; }
        if (two("||")) { t.kind = Tok::OrOr; i_ += 2; return; }
        switch (c) {
            case '<': t.kind = Tok::Lt; break;
            case '>': t.kind = Tok::Gt; break;
            case '!': t.kind = Tok::Bang; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '[': t.kind = Tok::LBracket; break;
            case ']': t.kind = Tok::RBracket; break;
            case ',': t.kind = Tok::Comma; break;
            default: fail(i_, std::string("unexpected character '") + c + "'", src_);
        }
        ++i_;
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string_view src) : toks_(std::move(toks)), src_(src) {}

    PredicateNodePtr run() {
        auto root = parse_or();
        if (peek().kind != Tok::End) fail(peek().pos, "unexpected trailing input", src_);
        return root;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_++]; }
    bool accept(Tok k) {
        if (peek().kind == k) {
            ++i_;
            return true;
        }
        return false;
    }

    template <typename N>
    static PredicateNodePtr make(N n) { return std::make_shared<PredicateNode>(PredicateNode{std::move(n)}); }

    PredicateNodePtr parse_or() {
        auto lhs = parse_and();
        while (accept(Tok::OrOr)) lhs = make(PredicateNode::Or{lhs, parse_and()});
        return lhs;
    }

    PredicateNodePtr parse_and() {
        auto lhs = parse_unary();
        while (accept(Tok::AndAnd)) lhs = make(PredicateNode::And{lhs, parse_unary()});
        return lhs;
    }

    PredicateNodePtr parse_unary() {
        if (accept(Tok::Bang)) return make(PredicateNode::Not{parse_unary()});
        return parse_compare();
    }

    PredicateNodePtr parse_compare() {
        auto lhs = parse_operand();
        std::optional<CompareOp> op;
        switch (peek().kind) {
            case Tok::EqEq: op = CompareOp::Eq; break;
            case Tok::NotEq: op = CompareOp::Ne; break;
            case Tok::Lt: op = CompareOp::Lt; break;
            case Tok::Le: op = CompareOp::Le; break;
            case Tok::Gt: op = CompareOp::Gt; break;
            case Tok::Ge: op = CompareOp::Ge; break;
            case Tok::In: {
                ++i_;
                if (!accept(Tok::LBracket)) fail(peek().pos, "expected '[' after 'in'", src_);
                std::vector<Json> options;
                if (peek().kind != Tok::RBracket) {
                    do {
                        auto lit = literal();
                        if (!lit) fail(peek().pos, "expected literal in list", src_);
                        options.push_back(*lit);
                    } while (accept(Tok::Comma));
                }
                if (!accept(Tok::RBracket)) fail(peek().pos, "expected ']'", src_);
                return make(PredicateNode::In{lhs, std::move(options)});
            }
            default:
                return lhs;
        }
        ++i_;
        return make(PredicateNode::Compare{*op, lhs, parse_operand()});
    }

    std::optional<Json> literal() {
        switch (peek().kind) {
            case Tok::Number:
            case Tok::String: return take().value;
            case Tok::True: ++i_; return Json(true);
            case Tok::False: ++i_; return Json(false);
            case Tok::Null: ++i_; return Json(nullptr);
            default: return std::nullopt;
        }
    }

    PredicateNodePtr parse_operand() {
        if (auto lit = literal()) return make(PredicateNode::Literal{*lit});
        if (peek().kind == Tok::Ident) return make(PredicateNode::Identifier{take().text});
        if (accept(Tok::LParen)) {
            auto inner = parse_or();
            if (!accept(Tok::RParen)) fail(peek().pos, "expected ')'", src_);
            return inner;
        }
        if (peek().kind == Tok::End) fail(peek().pos, "unexpected end of predicate", src_);
        fail(peek().pos, "expected operand", src_);
    }

    std::vector<Token> toks_;
    std::string_view src_;
    std::size_t i_ = 0;
};

Json eval_node(const PredicateNode& n, const Predicate::Lookup& lookup);

bool ordered(CompareOp op, const Json& a, const Json& b) {
    int cmp = 0;
    if (a.is_number() && b.is_number()) {
        double x = a.get<double>(), y = b.get<double>();
        cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else if (a.is_string() && b.is_string()) {
        cmp = a.get_ref<const std::string&>().compare(b.get_ref<const std::string&>());
    } else {
        return false;
    }
    switch (op) {
        case CompareOp::Lt: return cmp < 0;
        case CompareOp::Le: return cmp <= 0;
        case CompareOp::Gt: return cmp > 0;
        case CompareOp::Ge: return cmp >= 0;
        default: return false;
    }
}

Json eval_node(const PredicateNode& n, const Predicate::Lookup& lookup) {
    struct Visitor {
        const Predicate::Lookup& lookup;
        Json operator()(const PredicateNode::Literal& l) const { return l.value; }
        Json operator()(const PredicateNode::Identifier& id) const { return lookup ? lookup(id.name) : Json(nullptr); }
        Json operator()(const PredicateNode::Not& x) const { return !truthy(eval_node(*x.operand, lookup)); }
        Json operator()(const PredicateNode::And& x) const {
            return truthy(eval_node(*x.lhs, lookup)) && truthy(eval_node(*x.rhs, lookup));
        }
        Json operator()(const PredicateNode::Or& x) const {
            return truthy(eval_node(*x.lhs, lookup)) || truthy(eval_node(*x.rhs, lookup));
        }
        Json operator()(const PredicateNode::Compare& x) const {
            Json a = eval_node(*x.lhs, lookup);
            Json b = eval_node(*x.rhs, lookup);
            switch (x.op) {
                case CompareOp::Eq: return predicate_equal(a, b);
                case CompareOp::Ne: return !predicate_equal(a, b);
                default: return ordered(x.op, a, b);
            }
        }
        Json operator()(const PredicateNode::In& x) const {
            Json v = eval_node(*x.operand, lookup);
            for (const auto& opt : x.options) {
                if (predicate_equal(v, opt)) return true;
            }
            return false;
        }
    };
    return std::visit(Visitor{lookup}, n.node);
}

void collect_identifiers(const PredicateNode& n, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PredicateNode::Identifier>) {
                for (const auto& seen : out) {
                    if (seen == x.name) return;
                }
                out.push_back(x.name);
            } else if constexpr (std::is_same_v<T, PredicateNode::Not>) {
                collect_identifiers(*x.operand, out);
            } else if constexpr (std::is_same_v<T, PredicateNode::In>) {
                collect_identifiers(*x.operand, out);
            } else if constexpr (std::is_same_v<T, PredicateNode::Literal>) {
            } else {
                collect_identifiers(*x.lhs, out);
                collect_identifiers(*x.rhs, out);
            }
        },
        n.node);
}

PredicateNodePtr bind_node(const PredicateNodePtr& n, const Predicate::Lookup& lookup) {
    return std::visit(
        [&](const auto& x) -> PredicateNodePtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PredicateNode::Identifier>) {
                return std::make_shared<PredicateNode>(PredicateNode{PredicateNode::Literal{lookup(x.name)}});
            } else if constexpr (std::is_same_v<T, PredicateNode::Literal>) {
                return n;
            } else if constexpr (std::is_same_v<T, PredicateNode::Not>) {
                return std::make_shared<PredicateNode>(PredicateNode{PredicateNode::Not{bind_node(x.operand, lookup)}});
            } else if constexpr (std::is_same_v<T, PredicateNode::In>) {
                return std::make_shared<PredicateNode>(PredicateNode{PredicateNode::In{bind_node(x.operand, lookup), x.options}});
            } else if constexpr (std::is_same_v<T, PredicateNode::Compare>) {
                return std::make_shared<PredicateNode>(
                    PredicateNode{PredicateNode::Compare{x.op, bind_node(x.lhs, lookup), bind_node(x.rhs, lookup)}});
            } else {
                return std::make_shared<PredicateNode>(PredicateNode{T{bind_node(x.lhs, lookup), bind_node(x.rhs, lookup)}});
            }
        },
        n->node);
}

}  // namespace

Predicate Predicate::parse(std::string_view source) {
    Lexer lexer(source);
    Parser parser(lexer.run(), source);
    return Predicate(std::string(source), parser.run());
}

std::vector<std::string> Predicate::identifiers() const {
    std::vector<std::string> out;
    collect_identifiers(*root_, out);
    return out;
}

bool Predicate::evaluate(const Lookup& lookup) const {
    return truthy(eval_node(*root_, lookup));
}

Predicate Predicate::bind(const Lookup& lookup) const {
    return Predicate(source_, bind_node(root_, lookup));
}

bool predicate_equal(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
    if (a.type() != b.type()) return false;
    return a == b;
}

bool truthy(const Json& value) {
    switch (value.type()) {
        case Json::value_t::null: return false;
        case Json::value_t::boolean: return value.get<bool>();
        case Json::value_t::number_integer:
        case Json::value_t::number_unsigned:
        case Json::value_t::number_float: return value.get<double>() != 0.0;
        case Json::value_t::string: return !value.get_ref<const std::string&>().empty();
        default: return true;
    }
}

}  // namespace ivy
