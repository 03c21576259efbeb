#pragma once

#include "ivy/json.hpp"
#include "ivy/schema.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivy {

/// Per-grammar extension record: output schema, where datasets are injected
/// and which rewrite rule set applies.
struct LanguageSpec {
    std::string id;
    std::string display_name;
    Json schema;
    /// RFC 6901 pointer of the slot that receives dataset rows, if any.
    std::optional<std::string> data_injection_pointer;
    std::string rewrite_rule_set;
};

/// Registered languages. Registration happens at startup; after that the
/// registry is only read, and reads take no locks.
class LanguageRegistry {
public:
    /// `meta_schema` is the JSON Schema every registered schema must satisfy.
    explicit LanguageRegistry(Json meta_schema);

    /// Loads a manifest listing languages, schema files and their SHA-256
    /// digests. Throws BadSchema on a digest mismatch, Io on unreadable files.
    static LanguageRegistry load_manifest(const std::filesystem::path& manifest);

    /// Throws DuplicateId or BadSchema.
    void register_language(LanguageSpec spec);

    const LanguageSpec* find(std::string_view id) const;
    /// Throws UnknownLanguage.
    const LanguageSpec& get(std::string_view id) const;
    std::vector<std::string> ids() const;

    /// Empty iff `spec` conforms to the language schema. Throws UnknownLanguage.
    std::vector<SchemaError> validate_spec(std::string_view id, const Json& spec) const;

    /// Writes `rows` at the language's injection pointer unless a data binding
    /// already exists at or above it. Throws UnknownLanguage,
    /// NoInjectionPointer or PointerUnresolvable.
    Json inject_data(std::string_view id, Json spec, const std::vector<Json>& rows) const;

private:
    struct Entry {
        LanguageSpec spec;
        std::shared_ptr<const SchemaValidator> validator;
    };

    const Entry& entry(std::string_view id) const;

    std::shared_ptr<const SchemaValidator> meta_;
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Directory holding the language manifest and vendored schemas. Honors
/// IVY_DATA_DIR, falling back to the build-time location.
std::filesystem::path default_data_dir();
std::filesystem::path default_language_manifest();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string sha256_hex(std::string_view bytes);

}  // namespace ivy
