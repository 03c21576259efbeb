#pragma once

#include "ivy/json.hpp"

#include <map>
#include <memory>
#include <regex>
#include <string>
#include <vector>

namespace ivy {

struct SchemaError {
    std::string pointer;  ///< location in the validated instance
    std::string keyword;  ///< failing schema keyword
    std::string message;
    friend bool operator==(const SchemaError&, const SchemaError&) = default;
};

Json schema_errors_to_json(const std::vector<SchemaError>& errors);

/// Draft-07 JSON Schema validator over a single self-contained document.
/// Only same-document references ("#", "#/definitions/...") are supported;
/// `format` is treated as an annotation. All `$ref` targets and `pattern`
/// regexes are resolved at construction, so validate() is const and safe to
/// call from many threads.
class SchemaValidator {
public:
    /// Throws ivy::Error(BadSchema) for unresolvable references or patterns
    /// that do not compile.
    explicit SchemaValidator(Json schema);

    std::vector<SchemaError> validate(const Json& instance) const;
    bool accepts(const Json& instance) const;

    const Json& schema() const noexcept { return *schema_; }

private:
    bool check(const Json& schema, const Json& instance, const std::string& path, std::vector<SchemaError>* errors,
               int depth) const;
    void prepare(const Json& schema, const std::string& where);
    bool search(const std::string& pattern, const std::string& text) const;

    std::shared_ptr<const Json> schema_;
    std::map<std::string, const Json*> refs_;
    std::map<std::string, std::regex> patterns_;
};

}  // namespace ivy
