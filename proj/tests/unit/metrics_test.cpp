#include "ivy/metrics.hpp"
#include "ivy/parser.hpp"

#include "test_support.hpp"

#include <cmath>

using namespace ivy;
using testing_support::kFixtures;

TEST(Compression, PublishedCounts) {
    EXPECT_NEAR(compression_ratio(166, 14, 43), 3.53, 0.01);
    EXPECT_EQ(compression_ratio(32, 3, 16), 1.8125);
    EXPECT_IVY_ERROR(compression_ratio(10, 0, 0), ErrorCode::DivisionByZero);
    EXPECT_IVY_ERROR(compression_ratio(1, 2, 1), ErrorCode::BadManifest);
}

TEST(Compression, Linearity) {
    EXPECT_DOUBLE_EQ(compression_ratio(20, 0, 4), 2 * compression_ratio(10, 0, 4));
    EXPECT_DOUBLE_EQ(compression_ratio(20, 0, 2), 2 * compression_ratio(20, 0, 4));
}

TEST(Sizes, HandCounted) {
    // object + field a + 1 + field b + list + 2 items
    EXPECT_EQ(ast_size(parse_json(R"({"a":1,"b":[true,null]})")), 7u);
    EXPECT_EQ(loc_size(parse_json(R"({"a":1})")), 3u);
    EXPECT_EQ(loc_size(Json(5)), 1u);
    // cond + then atomic; interpolation counts pieces
    EXPECT_EQ(ast_size(parse_body(parse_json(R"({"$cond":{"query":"a","true":1}})"))), 2u);
    EXPECT_EQ(ast_size(parse_body(parse_json(R"("[w]x[h]")"))), 3u);
    EXPECT_EQ(ast_size(parse_body(parse_json(R"("[w]")"))), 1u);
}

TEST(Concatenation, SelfCoverage) {
    Json spec = parse_json(read_file(kFixtures / "specs/aggregate-bar-chart.vl.json"));
    EXPECT_DOUBLE_EQ(concatenation_ratio({spec}, Expression::from_json(spec), SizeMeasure::Ast), 1.0);
    EXPECT_IVY_ERROR(concatenation_ratio({}, Expression::from_json(spec), SizeMeasure::Ast), ErrorCode::EmptyExampleSet);
}

TEST(Coverage, BundledManifest) {
    Json report = verify_coverage(kFixtures / "coverage/manifest.json");
    EXPECT_EQ(report["summary"]["excluded"], Json(1));
    EXPECT_EQ(report["summary"]["failed"], Json(0));
    EXPECT_EQ(report["summary"]["passed"], Json(4));
    EXPECT_NEAR(report["corpusCounts"]["compressionRatio"].get<double>(), 3.53, 0.01);
    EXPECT_FALSE(coverage_table(report).empty());
}

namespace {

std::filesystem::path copy_manifest(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::filesystem::copy(kFixtures / "coverage", dir / "coverage", std::filesystem::copy_options::recursive);
    std::filesystem::copy(kFixtures / "templates", dir / "templates");
    return dir / "coverage/manifest.json";
}

}  // namespace

TEST(Coverage, WrongSettingsGiveDiff) {
    auto manifest = copy_manifest("ivy-coverage-wrong");
    write_file(manifest.parent_path() / "settings/bar-2000.settings.json",
               R"({"xDim":"age","yDim":"people","year":1950,"sort":false})");
    Json report = verify_coverage(manifest);
    EXPECT_EQ(report["summary"]["failed"], Json(1));
    const Json& bar = report["examples"][0];
    EXPECT_EQ(bar["status"], Json("fail"));
    EXPECT_FALSE(bar["diff"].empty());
}

TEST(Coverage, MissingSettings) {
    auto manifest = copy_manifest("ivy-coverage-missing");
    Json m = parse_json(read_file(manifest));
    m["examples"][0].erase("settings");
    write_file(manifest, m.dump());
    EXPECT_IVY_ERROR(verify_coverage(manifest), ErrorCode::MissingSettings);
}

TEST(Diff, ReportsPointers) {
    Json d = structural_diff(parse_json(R"({"a":1,"b":[1,2]})"), parse_json(R"({"b":[1,3],"a":1,"c":0})"));
    std::string text = d.dump();
    EXPECT_NE(text.find("/b/1"), std::string::npos);
    EXPECT_NE(text.find("/c"), std::string::npos);
}
