#include "ivy/languages.hpp"
#include "ivy/schema.hpp"

#include "test_support.hpp"

#include <fstream>

using namespace ivy;
using testing_support::kRoot;
using testing_support::registry;

namespace {

Json draft07() { return parse_json(read_file(kRoot / "data/languages/schemas/json-schema-draft-07.json")); }

std::filesystem::path temp_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Schema, Keywords) {
    SchemaValidator v(parse_json(R"({
        "type":"object","required":["a"],"additionalProperties":false,
        "properties":{"a":{"type":"integer","minimum":0},"b":{"enum":["x","y"]},"c":{"$ref":"#/definitions/s"}},
        "definitions":{"s":{"type":"string","pattern":"^[a-z]+$","maxLength":3}}})"));
    EXPECT_TRUE(v.accepts(parse_json(R"({"a":1,"b":"x","c":"abc"})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"b":"x"})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":-1})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":1.5})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":1,"b":"z"})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":1,"c":"abcd"})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":1,"c":"AB"})")));
    EXPECT_FALSE(v.accepts(parse_json(R"({"a":1,"d":0})")));
    auto errs = v.validate(parse_json(R"({"a":"no"})"));
    ASSERT_FALSE(errs.empty());
    EXPECT_EQ(errs[0].pointer, "/a");
}

TEST(Schema, Combinators) {
    SchemaValidator v(parse_json(R"({"anyOf":[{"type":"string"},{"type":"array","items":{"type":"number"},"minItems":1}],
                                    "not":{"const":"bad"}})"));
    EXPECT_TRUE(v.accepts(Json("ok")));
    EXPECT_TRUE(v.accepts(parse_json("[1,2]")));
    EXPECT_FALSE(v.accepts(Json("bad")));
    EXPECT_FALSE(v.accepts(parse_json("[]")));
    EXPECT_FALSE(v.accepts(parse_json(R"(["x"])")));
    SchemaValidator one(parse_json(R"({"oneOf":[{"type":"number"},{"type":"integer"}]})"));
    EXPECT_TRUE(one.accepts(Json(1.5)));
    EXPECT_FALSE(one.accepts(Json(2)));
}

TEST(Schema, BadReference) {
    EXPECT_IVY_ERROR(SchemaValidator(parse_json(R"({"$ref":"#/definitions/missing"})")), ErrorCode::BadSchema);
}

TEST(Registry, BundledLanguages) {
    const auto& r = registry();
    EXPECT_EQ(r.ids(), (std::vector<std::string>{"table", "vega", "vega-lite"}));
    EXPECT_EQ(r.get("vega-lite").data_injection_pointer, std::optional<std::string>("/data/values"));
    EXPECT_FALSE(r.get("vega").data_injection_pointer);
    EXPECT_IVY_ERROR(r.get("plotly"), ErrorCode::UnknownLanguage);
    EXPECT_TRUE(r.validate_spec("vega-lite", parse_json(R"({"data":{"values":[]},"mark":"bar"})")).empty());
    EXPECT_FALSE(r.validate_spec("vega-lite", parse_json(R"({"data":{"values":[]},"mark":"barr"})")).empty());
    EXPECT_FALSE(r.validate_spec("vega-lite", parse_json(R"({"mark":"bar"})")).empty());
}

TEST(Registry, RegisterLanguage) {
    LanguageRegistry r(draft07());
    LanguageSpec spec{"tiny", "Tiny", parse_json(R"({"type":"object","required":["kind"]})"), "/rows", "none"};
    r.register_language(spec);
    EXPECT_IVY_ERROR(r.register_language(spec), ErrorCode::DuplicateId);
    LanguageSpec bad{"broken", "Broken", parse_json(R"({"type":12})"), std::nullopt, "none"};
    EXPECT_IVY_ERROR(r.register_language(bad), ErrorCode::BadSchema);
    EXPECT_FALSE(r.validate_spec("tiny", parse_json("{}")).empty());
}

TEST(Registry, InjectData) {
    const auto& r = registry();
    std::vector<Json> rows{parse_json(R"({"a":1})")};
    Json out = r.inject_data("vega-lite", parse_json(R"({"mark":"bar"})"), rows);
    EXPECT_EQ(out["data"]["values"], parse_json(R"([{"a":1}])"));
    // An existing data binding wins.
    Json bound = parse_json(R"({"data":{"url":"x.csv"},"mark":"bar"})");
    EXPECT_EQ(r.inject_data("vega-lite", bound, rows), bound);
    EXPECT_IVY_ERROR(r.inject_data("vega", parse_json("{}"), rows), ErrorCode::NoInjectionPointer);
    Json named = parse_json(R"({"data":{"name":"table"},"mark":"bar"})");
    EXPECT_EQ(r.inject_data("vega-lite", named, rows), named);
    EXPECT_IVY_ERROR(r.inject_data("vega-lite", parse_json("[1]"), rows), ErrorCode::PointerUnresolvable);
}

TEST(Registry, ManifestDigestMismatch) {
    auto dir = temp_dir("ivy-manifest-test");
    std::filesystem::copy_file(kRoot / "data/languages/schemas/json-schema-draft-07.json", dir / "meta.json");
    write_file(dir / "s.json", R"({"type":"object"})");
    Json m{{"metaSchema", {{"path", "meta.json"}, {"sha256", sha256_hex(read_file(dir / "meta.json"))}}},
           {"languages", Json::array({Json{{"id", "s"}, {"displayName", "S"},
                                            {"schema", {{"path", "s.json"}, {"sha256", std::string(64, '0')}}},
                                            {"dataInjectionPointer", nullptr},
                                            {"rewriteRules", "none"}}})}};
    write_file(dir / "manifest.json", m.dump());
    EXPECT_IVY_ERROR(LanguageRegistry::load_manifest(dir / "manifest.json"), ErrorCode::BadSchema);
    m["languages"][0]["schema"]["sha256"] = sha256_hex(read_file(dir / "s.json"));
    write_file(dir / "manifest.json", m.dump());
    EXPECT_EQ(LanguageRegistry::load_manifest(dir / "manifest.json").ids(), std::vector<std::string>{"s"});
    EXPECT_IVY_ERROR(LanguageRegistry::load_manifest(dir / "absent.json"), ErrorCode::Io);
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
