#include "ivy/model.hpp"
#include "ivy/parser.hpp"

#include "test_support.hpp"

using namespace ivy;

namespace {

Template make(const char* params, const char* body, const char* symbols = "[]") {
    return parse_template(std::string(R"({"name":"t","description":"","language":"vega-lite","params":)") + params +
                          R"(,"symbols":)" + symbols + R"(,"body":)" + body + "}");
}

std::vector<std::string> kinds(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(std::string(diagnostic_name(d.kind)) + ":" + d.name);
    return out;
}

}  // namespace

TEST(Lint, CleanTemplate) {
    auto t = make(R"([{"name":"yDim","type":"DataTarget","config":{"allowedRoles":["Measure"]}}])", R"({"f":"[yDim]"})");
    EXPECT_TRUE(lint_template(t).empty());
}

TEST(Lint, UndeclaredVariable) {
    auto t = make("[]", R"({"f":"[zDim]"})");
    EXPECT_EQ(kinds(lint_template(t)), std::vector<std::string>{"UndeclaredVariable:zDim"});
}

TEST(Lint, UnusedParameter) {
    auto t = make(R"([{"name":"sort","type":"Boolean","config":{}}])", R"({"f":1})");
    EXPECT_EQ(kinds(lint_template(t)), std::vector<std::string>{"UnusedParameter:sort"});
}

TEST(Lint, PredicateUseCountsAsReference) {
    auto t = make(R"([{"name":"sort","type":"Boolean","config":{}}])", R"({"f":{"$cond":{"query":"sort","true":1}}})");
    EXPECT_TRUE(lint_template(t).empty());
}

TEST(Lint, DuplicatesAndConfig) {
    auto dup = make(R"([{"name":"a","type":"Boolean","config":{}},{"name":"a","type":"Boolean","config":{}}])", R"("[a]")");
    EXPECT_EQ(kinds(lint_template(dup)), std::vector<std::string>{"DuplicateName:a"});
    auto bad = make(R"([{"name":"n","type":"Number","config":{"min":5,"max":1,"step":1}}])", R"("[n]")");
    EXPECT_EQ(kinds(lint_template(bad)), std::vector<std::string>{"InvalidParamConfig:n"});
    auto zero = make(R"([{"name":"m","type":"MultiDataTarget","config":{"allowedRoles":["Measure"],"maxCount":0}}])", R"("[m]")");
    EXPECT_EQ(kinds(lint_template(zero)), std::vector<std::string>{"InvalidParamConfig:m"});
}

TEST(Lint, SymbolsAreDeclarations) {
    auto t = make("[]", R"("[count]")", R"([{"name":"count","description":"row count"}])");
    EXPECT_TRUE(lint_template(t).empty());
}

TEST(ValidateArgument, Cases) {
    Parameter agg{"agg", param::Enum{{"count", "distinct"}}, {}, {}};
    EXPECT_FALSE(validate_argument(agg, Json("count")));
    EXPECT_TRUE(validate_argument(agg, Json("sum")));

    Parameter n{"n", param::Number{0, 100, 1}, {}, {}};
    auto v = validate_argument(n, Json(150));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->parameter, "n");
    EXPECT_FALSE(validate_argument(n, Json(100)));
    EXPECT_TRUE(validate_argument(n, Json("5")));

    Parameter m{"m", param::MultiDataTarget{{DataRole::Measure}, false, 2, std::nullopt}, {}, {}};
    EXPECT_TRUE(validate_argument(m, std::vector<std::string>{"a"}));
    EXPECT_FALSE(validate_argument(m, std::vector<std::string>{"a", "b"}));

    Parameter b{"b", param::Boolean{}, {}, {}};
    EXPECT_TRUE(validate_argument(b, Json(1)));
    EXPECT_FALSE(validate_argument(b, Json(nullptr)));

    Parameter d{"d", param::DataTarget{{DataRole::Measure}, true}, {}, {}};
    EXPECT_FALSE(validate_argument(d, Json("col")));
    EXPECT_TRUE(validate_argument(d, Json(3)));
}

TEST(Settings, UnknownKeysAreViolations) {
    auto t = make(R"([{"name":"a","type":"Boolean","config":{}}])", R"("[a]")");
    auto vs = validate_settings(t, parse_settings(R"({"a":true,"zz":1})"));
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].parameter, "zz");
}

TEST(Settings, DefaultsFillUnset) {
    auto t = make(R"([{"name":"a","type":"Number","config":{"min":0,"max":10,"step":1},"defaultValue":3}])", R"("[a]")");
    EXPECT_EQ(with_defaults(t, Settings{}).find("a")->atomic(), Json(3));
    EXPECT_EQ(with_defaults(t, parse_settings(R"({"a":5})")).find("a")->atomic(), Json(5));
}

TEST(Settings, KeyOrderInsensitiveComparison) {
    auto a = parse_settings(R"({"x":1,"y":"b"})");
    auto b = parse_settings(R"({"y":"b","x":1})");
    EXPECT_TRUE(a.same_bindings(b));
    EXPECT_FALSE(a == b);
}
