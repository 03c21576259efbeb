#include "ivy/data.hpp"

#include "test_support.hpp"

using namespace ivy;
using testing_support::kFixtures;

TEST(LoadDataset, Csv) {
    Dataset d = load_dataset("a\n1\n2\n", DataFormat::Csv);
    ASSERT_EQ(d.columns.size(), 1u);
    EXPECT_EQ(d.columns[0].role, DataRole::Measure);
    ASSERT_EQ(d.rows.size(), 2u);
    EXPECT_EQ(d.rows[0]["a"], Json(1));
    EXPECT_EQ(d.rows[1]["a"], Json(2));
}

TEST(LoadDataset, MixedColumnKeepsText) {
    Dataset d = load_dataset("v\n1\nx\n", DataFormat::Csv);
    EXPECT_EQ(d.columns[0].role, DataRole::Dimension);
    EXPECT_EQ(d.rows[0]["v"], Json("1"));
}

TEST(LoadDataset, QuotingAndMissingCells) {
    Dataset d = load_dataset("name,n\n\"a, \"\"b\"\"\",\n\"multi\nline\",4\n", DataFormat::Csv);
    ASSERT_EQ(d.rows.size(), 2u);
    EXPECT_EQ(d.rows[0]["name"], Json("a, \"b\""));
    EXPECT_TRUE(d.rows[0]["n"].is_null());
    EXPECT_EQ(d.rows[1]["name"], Json("multi\nline"));
    EXPECT_EQ(d.columns[1].role, DataRole::Measure);
}

TEST(LoadDataset, Errors) {
    EXPECT_IVY_ERROR(load_dataset("[]", DataFormat::JsonArray), ErrorCode::EmptyDataset);
    EXPECT_IVY_ERROR(load_dataset("a,b\n1\n", DataFormat::Csv), ErrorCode::RaggedCsv);
    EXPECT_IVY_ERROR(load_dataset(R"([{"a":{"b":1}}])", DataFormat::JsonArray), ErrorCode::NonFlatJson);
    EXPECT_IVY_ERROR(load_dataset("a\n1\n", DataFormat::Csv, 3), ErrorCode::DatasetTooLarge);
}

TEST(LoadDataset, JsonArrayFillsMissingKeys) {
    Dataset d = load_dataset(R"([{"a":1},{"b":"x"}])", DataFormat::JsonArray);
    ASSERT_EQ(d.columns.size(), 2u);
    EXPECT_TRUE(d.rows[0]["b"].is_null());
    EXPECT_TRUE(d.rows[1]["a"].is_null());
    EXPECT_EQ(d.rows[1].begin().key(), "a");
}

TEST(InferRole, Rules) {
    EXPECT_EQ(infer_role({Json(1), Json(2.5), Json(3)}), DataRole::Measure);
    EXPECT_EQ(infer_role({Json("2015-01-02"), Json("2016-07-01")}), DataRole::Time);
    EXPECT_EQ(infer_role({Json("USA"), Json("Chile")}), DataRole::Dimension);
    EXPECT_EQ(infer_role({Json(nullptr)}), DataRole::Dimension);
    EXPECT_EQ(infer_role({Json("1999"), Json("2001"), Json(nullptr)}), DataRole::Time);
    EXPECT_EQ(infer_role({Json("2020-05-01T10:00:00Z")}), DataRole::Time);
    EXPECT_EQ(infer_role({Json("2020-13-01")}), DataRole::Dimension);
}

TEST(Filters, RangeAndOneOf) {
    Dataset d = load_dataset(read_file(kFixtures / "data/population.csv"), DataFormat::Csv);
    Filter year{"year", RangeFilter{2000, 2000}};
    Dataset only = apply_filters(d, {year});
    ASSERT_FALSE(only.rows.empty());
    for (const auto& r : only.rows) EXPECT_EQ(r["year"], Json(2000));

    Filter sex{"sex", OneOfFilter{{Json(1)}}};
    std::size_t n = apply_filters(d, {year, sex}).rows.size();
    EXPECT_GT(n, 0u);
    EXPECT_LT(n, only.rows.size());
    EXPECT_IVY_ERROR(apply_filters(d, {Filter{"nope", RangeFilter{0, 1}}}), ErrorCode::UnknownColumn);
}

TEST(Filters, NullsAreDropped) {
    Dataset d = load_dataset("a,b\n1,x\n,y\n3,z\n", DataFormat::Csv);
    EXPECT_EQ(apply_filters(d, {Filter{"a", RangeFilter{0, 10}}}).rows.size(), 2u);
}

TEST(Roles, Override) {
    Dataset d = load_dataset("year,v\n1990,1\n2000,2\n", DataFormat::Csv);
    EXPECT_EQ(d.columns[0].role, DataRole::Measure);
    d.set_role("year", DataRole::Time);
    EXPECT_EQ(d.columns[0].role, DataRole::Time);
    EXPECT_TRUE(d.columns[0].role_overridden);
    EXPECT_IVY_ERROR(d.set_role("zz", DataRole::Time), ErrorCode::UnknownColumn);
    EXPECT_EQ(column_roles(d).size(), 2u);
}
