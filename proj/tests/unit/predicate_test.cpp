#include "ivy/predicate.hpp"

#include "test_support.hpp"

#include <map>

using namespace ivy;

namespace {

bool eval(std::string_view src, const std::map<std::string, Json>& env = {}) {
    return Predicate::parse(src).evaluate([&](const std::string& n) {
        auto it = env.find(n);
        return it == env.end() ? Json(nullptr) : it->second;
    });
}

}  // namespace

TEST(Predicate, SortEqualsTrue) {
    EXPECT_TRUE(eval("sort == true", {{"sort", true}}));
    EXPECT_FALSE(eval("sort == true", {{"sort", false}}));
    EXPECT_FALSE(eval("sort == true"));
}

TEST(Predicate, Literals) {
    EXPECT_TRUE(eval("true"));
    EXPECT_FALSE(eval("false"));
    EXPECT_FALSE(eval("null"));
    EXPECT_FALSE(eval("0"));
    EXPECT_TRUE(eval("'x'"));
    EXPECT_FALSE(eval("''"));
}

TEST(Predicate, Membership) {
    EXPECT_TRUE(eval("year in [1990, 2000]", {{"year", 2000}}));
    EXPECT_FALSE(eval("year in [1990, 2000]", {{"year", 1995}}));
    EXPECT_TRUE(eval("year in [2000.0]", {{"year", 2000}}));
    EXPECT_TRUE(eval("c in ['a', \"b\"]", {{"c", "b"}}));
}

// Truth table for && || ! over every pair of booleans.
TEST(Predicate, ConnectiveTruthTable) {
    for (bool a : {false, true}) {
        for (bool b : {false, true}) {
            std::map<std::string, Json> env{{"a", a}, {"b", b}};
            EXPECT_EQ(eval("a && b", env), a && b);
            EXPECT_EQ(eval("a || b", env), a || b);
            EXPECT_EQ(eval("!a", env), !a);
            EXPECT_EQ(eval("!a || b && a", env), !a || (b && a));
            EXPECT_EQ(eval("!(a || b)", env), !(a || b));
        }
    }
}

TEST(Predicate, OrderedComparisons) {
    EXPECT_TRUE(eval("x < 3", {{"x", 2}}));
    EXPECT_TRUE(eval("x <= 2.0", {{"x", 2}}));
    EXPECT_TRUE(eval("'b' > 'a'"));
    EXPECT_FALSE(eval("x < 3"));          // null
    EXPECT_FALSE(eval("'1' < 2"));        // mixed types
    EXPECT_FALSE(eval("true >= false"));  // booleans are unordered
}

TEST(Predicate, EqualityAcrossTypes) {
    EXPECT_FALSE(eval("x == '1'", {{"x", 1}}));
    EXPECT_TRUE(eval("x != '1'", {{"x", 1}}));
    EXPECT_TRUE(eval("x == null"));
    EXPECT_TRUE(eval("x != null", {{"x", 0}}));
    EXPECT_TRUE(predicate_equal(Json(1), Json(1.0)));
    EXPECT_FALSE(predicate_equal(Json(nullptr), Json(false)));
}

TEST(Predicate, Identifiers) {
    auto p = Predicate::parse("a == 1 && (b || !a) && c in [1]");
    EXPECT_EQ(p.identifiers(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Predicate, SyntaxErrorsCarryPosition) {
    for (const char* bad : {"", "a ==", "a == == b", "(a", "a in 1", "a in [b]", "a < b < c", "'open", "a & b"}) {
        try {
            Predicate::parse(bad);
            ADD_FAILURE() << "accepted: " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::BadPredicate) << bad;
            EXPECT_TRUE(e.detail().contains("position")) << bad;
        }
    }
}

TEST(Predicate, BindReplacesIdentifiers) {
    auto p = Predicate::parse("sort == true");
    auto bound = p.bind([](const std::string&) { return Json(true); });
    EXPECT_TRUE(bound.evaluate([](const std::string&) { return Json(nullptr); }));
    EXPECT_EQ(bound.source(), "sort == true");
}
