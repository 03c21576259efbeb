#include "ivy/parser.hpp"
#include "ivy/store.hpp"

#include "test_support.hpp"

#include <fstream>
#include <thread>

using namespace ivy;
using testing_support::kFixtures;

namespace {

Template fixture(const char* name) {
    return parse_template(read_file(kFixtures / "templates" / (std::string(name) + ".ivy.json")));
}

std::filesystem::path fresh_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Store, PublishVersions) {
    TemplateStore store;
    Template t = fixture("line-chart");
    EXPECT_EQ(store.publish(t, 0, "ann").tpl.version, 1u);
    EXPECT_EQ(store.publish(t, std::nullopt, "ann").tpl.version, 2u);
    EXPECT_IVY_ERROR(store.publish(t, 1, "bob"), ErrorCode::VersionConflict);
    EXPECT_IVY_ERROR(store.publish(t, 0, "bob"), ErrorCode::VersionConflict);
    EXPECT_EQ(store.latest("line-chart")->tpl.version, 2u);
    EXPECT_EQ(store.get("line-chart", 1)->owner, "ann");
    EXPECT_FALSE(store.get("line-chart", 9));
    EXPECT_FALSE(store.latest("nope"));
}

TEST(Store, NamesAreChecked) {
    TemplateStore store;
    Template t = fixture("line-chart");
    t.name = "../escape";
    EXPECT_IVY_ERROR(store.publish(t, std::nullopt, ""), ErrorCode::BadTemplateShape);
}

TEST(Store, Fork) {
    TemplateStore store;
    store.publish(fixture("scatterplot"), std::nullopt, "ann");
    auto f = store.fork("scatterplot", "my-scatter", "bob");
    EXPECT_EQ(f.tpl.version, 1u);
    ASSERT_TRUE(f.fork_of);
    EXPECT_EQ(f.fork_of->first, "scatterplot");
    EXPECT_EQ(stored_info_to_json(f)["forkOf"]["version"], Json(1));
    EXPECT_IVY_ERROR(store.fork("absent", "x", ""), ErrorCode::NotFound);
    EXPECT_IVY_ERROR(store.fork("scatterplot", "my-scatter", ""), ErrorCode::VersionConflict);
    EXPECT_EQ(store.list().size(), 2u);
    EXPECT_EQ(store.catalog().size(), 2u);
}

TEST(Store, PersistsAndReplays) {
    auto dir = fresh_dir("ivy-store-replay");
    Template t = fixture("aggregate-bar-chart");
    {
        TemplateStore store(dir);
        store.publish(t, std::nullopt, "ann");
        store.publish(t, 1, "ann");
        store.fork("aggregate-bar-chart", "bars", "bob");
    }
    // A torn trailing line is ignored.
    std::ofstream(dir / "log.jsonl", std::ios::app) << "{\"name\":\"bro";
    TemplateStore again(dir);
    EXPECT_EQ(again.latest("aggregate-bar-chart")->tpl.version, 2u);
    EXPECT_EQ(serialize_template(again.get("aggregate-bar-chart", 1)->tpl), read_file(kFixtures / "templates/aggregate-bar-chart.ivy.json"));
    EXPECT_EQ(again.latest("bars")->fork_of->second, 2u);
}

TEST(Store, ConcurrentPublishersGetDistinctVersions) {
    TemplateStore store(fresh_dir("ivy-store-concurrent"));
    Template t = fixture("line-chart");
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            for (int k = 0; k < 5; ++k) store.publish(t, std::nullopt, "w");
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(store.latest("line-chart")->tpl.version, 40u);
    for (std::uint64_t v = 1; v <= 40; ++v) EXPECT_TRUE(store.get("line-chart", v)) << v;
}
