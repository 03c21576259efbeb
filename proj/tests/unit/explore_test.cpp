#include "ivy/explore.hpp"
#include "ivy/parser.hpp"

#include "test_support.hpp"

using namespace ivy;
using testing_support::kFixtures;
using testing_support::registry;

namespace {

Template fixture(const char* name) {
    return parse_template(read_file(kFixtures / "templates" / (std::string(name) + ".ivy.json")));
}

Template with_params(const char* name, const char* params) {
    return parse_template(std::string(R"({"name":")") + name + R"(","description":"","language":"vega-lite","params":)" +
                          params + R"(,"symbols":[],"body":{}})");
}

}  // namespace

TEST(Match, FigureTemplateAcceptsOneMeasure) {
    auto r = match_template(fixture("aggregate-bar-chart"), {{"people", DataRole::Measure}});
    EXPECT_EQ(r.kind, MatchKind::Complete);
    EXPECT_EQ(r.mapping, (std::vector<std::pair<std::string, std::string>>{{"people", "yDim"}}));
}

TEST(Match, PartialAndNoMatch) {
    Template t = fixture("scatterplot");
    auto partial = match_template(t, {{"hp", DataRole::Measure}});
    EXPECT_EQ(partial.kind, MatchKind::Partial);
    EXPECT_EQ(partial.uncovered_required, 1u);
    auto none = match_template(t, {{"d", DataRole::Time}});
    EXPECT_EQ(none.kind, MatchKind::NoMatch);
    EXPECT_TRUE(none.mapping.empty());
    auto too_many = match_template(t, {{"a", DataRole::Measure}, {"b", DataRole::Measure}, {"c", DataRole::Measure}});
    EXPECT_EQ(too_many.kind, MatchKind::NoMatch);
}

// A greedy first-fit would put the Measure into `either` and strand `only`.
TEST(Match, NeedsAugmentingPath) {
    Template t = with_params("g", R"([
        {"name":"either","type":"DataTarget","config":{"allowedRoles":["Measure","Dimension"],"required":true}},
        {"name":"only","type":"DataTarget","config":{"allowedRoles":["Dimension"],"required":true}}])");
    auto r = match_template(t, {{"m", DataRole::Measure}, {"d", DataRole::Dimension}});
    EXPECT_EQ(r.kind, MatchKind::Complete);
    EXPECT_EQ(r.mapping, (std::vector<std::pair<std::string, std::string>>{{"m", "either"}, {"d", "only"}}));
}

TEST(Match, MultiTargetCounts) {
    Template t = with_params("m", R"([
        {"name":"cols","type":"MultiDataTarget","config":{"allowedRoles":["Measure"],"required":true,"minCount":2,"maxCount":3}}])");
    EXPECT_EQ(match_template(t, {{"a", DataRole::Measure}}).kind, MatchKind::Partial);
    EXPECT_EQ(match_template(t, {{"a", DataRole::Measure}, {"b", DataRole::Measure}}).kind, MatchKind::Complete);
    std::vector<ColumnQuery> four{{"a", DataRole::Measure}, {"b", DataRole::Measure}, {"c", DataRole::Measure},
                                  {"d", DataRole::Measure}};
    EXPECT_EQ(match_template(t, four).kind, MatchKind::NoMatch);
}

TEST(Search, Ordering) {
    std::vector<Template> catalog{fixture("scatterplot"), fixture("line-chart"), fixture("aggregate-bar-chart")};
    auto hits = search_catalog(catalog, {{"price", DataRole::Measure}});
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].tpl->name, "aggregate-bar-chart");
    EXPECT_EQ(hits[0].match.kind, MatchKind::Complete);
    // Both partial with one uncovered; name breaks the tie.
    EXPECT_EQ(hits[1].tpl->name, "line-chart");
    EXPECT_EQ(hits[2].tpl->name, "scatterplot");
    EXPECT_TRUE(search_catalog(catalog, {{"a", DataRole::Time}, {"b", DataRole::Time}}).empty());
}

TEST(Shelf, DeclarationOrderAndRole) {
    Template t = fixture("scatterplot");
    Settings s = add_to_shelf(t, {"hp", DataRole::Measure}, Settings{});
    s = add_to_shelf(t, {"mpg", DataRole::Measure}, s);
    s = add_to_shelf(t, {"origin", DataRole::Dimension}, s);
    EXPECT_EQ(s.find("xDim")->atomic(), Json("hp"));
    EXPECT_EQ(s.find("yDim")->atomic(), Json("mpg"));
    EXPECT_EQ(s.find("colorDim")->atomic(), Json("origin"));
    Settings full = add_to_shelf(t, {"extra", DataRole::Measure}, s);
    EXPECT_EQ(full, s);
}

TEST(Shelf, MultiTargetAppends) {
    Template t = with_params("m", R"([{"name":"cols","type":"MultiDataTarget","config":{"allowedRoles":["Measure"],"maxCount":2}}])");
    Settings s = add_to_shelf(t, {"a", DataRole::Measure}, Settings{});
    s = add_to_shelf(t, {"b", DataRole::Measure}, s);
    EXPECT_EQ(s.find("cols")->list(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(add_to_shelf(t, {"c", DataRole::Measure}, s), s);
}

TEST(Translate, CarriesColumns) {
    Template from = fixture("scatterplot");
    Template to = fixture("aggregate-bar-chart");
    Settings s = parse_settings(R"({"xDim":"Horsepower","yDim":"Miles_per_Gallon","opacity":0.5,
                                    "$filters":[{"column":"Origin","kind":"oneOf","values":["USA"]}]})");
    auto role = [](const std::string&) -> std::optional<DataRole> { return DataRole::Measure; };
    Translation tr = translate_settings(from, to, s, role);
    EXPECT_EQ(tr.settings.find("xDim")->atomic(), Json("Horsepower"));
    EXPECT_EQ(tr.settings.find("yDim")->atomic(), Json("Miles_per_Gallon"));
    EXPECT_FALSE(tr.settings.contains("opacity"));
    EXPECT_TRUE(tr.settings.filters);
    EXPECT_EQ(tr.kind, MatchKind::Complete);
    EXPECT_TRUE(tr.dropped.empty());

    Template line = fixture("line-chart");
    Translation partial = translate_settings(from, line, s, role);
    EXPECT_EQ(partial.kind, MatchKind::Partial);
    EXPECT_EQ(partial.dropped, std::vector<std::string>{"Miles_per_Gallon"});

    auto time_only = [](const std::string&) -> std::optional<DataRole> { return DataRole::Time; };
    // Scatterplot slots take Measures only.
    EXPECT_IVY_ERROR(translate_settings(from, from, s, time_only), ErrorCode::NoMatch);
    auto unknown = [](const std::string&) -> std::optional<DataRole> { return std::nullopt; };
    EXPECT_IVY_ERROR(translate_settings(from, to, s, unknown), ErrorCode::NoMatch);
}

TEST(FanOut, ProductAndOrder) {
    Template t = fixture("aggregate-bar-chart");
    FanOutRequest req{t.name, parse_settings(R"({"xDim":"age","yDim":"people"})"),
                      {{"year", {Json(1900), Json(2000)}}, {"sort", {Json(true), Json(false)}}}};
    auto cells = fan_out(t, req, nullptr, registry(), {2, true});
    ASSERT_EQ(cells.size(), 4u);
    // sort is declared before year, so it varies slowest.
    EXPECT_EQ(cells[0].settings.find("sort")->atomic(), Json(true));
    EXPECT_EQ(cells[0].settings.find("year")->atomic(), Json(1900));
    EXPECT_EQ(cells[1].settings.find("year")->atomic(), Json(2000));
    EXPECT_EQ(cells[2].settings.find("sort")->atomic(), Json(false));
    for (const auto& c : cells) EXPECT_TRUE(c.spec);
    EXPECT_EQ(fan_out_file_name(3, cells[3].settings).size(), std::string("0003-").size() + 12 + 5);
}

TEST(FanOut, RecordsCellErrors) {
    Template t = fixture("aggregate-bar-chart");
    FanOutRequest req{t.name, parse_settings(R"({"xDim":"age"})"), {{"yDim", {Json("people"), Json(nullptr)}}}};
    auto cells = fan_out(t, req, nullptr, registry());
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_TRUE(cells[0].spec);
    ASSERT_TRUE(cells[1].error);
    EXPECT_EQ((*cells[1].error)["error"], Json("SchemaViolation"));
}

TEST(FanOut, RejectsBadRequests) {
    Template t = fixture("aggregate-bar-chart");
    EXPECT_IVY_ERROR(check_fan_out(t, {t.name, {}, {{"nope", {Json(1)}}}}), ErrorCode::BadSettingsShape);
    EXPECT_IVY_ERROR(check_fan_out(t, {t.name, {}, {{"year", {}}}}), ErrorCode::BadSettingsShape);
    EXPECT_IVY_ERROR(check_fan_out(t, {t.name, {}, {{"year", {Json(1700)}}}}), ErrorCode::SettingsViolation);
}
