#pragma once

#include "ivy/json.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace ivy {

enum class ErrorCode {
    JsonSyntax,
    UnknownTopLevelKey,
    BadParamType,
    BadPredicate,
    BadConditionalShape,
    BadSettingsShape,
    BadFilterShape,
    BadTemplateShape,
    SettingsViolation,
    TopLevelBottom,
    SchemaViolation,
    UnknownLanguage,
    DuplicateId,
    BadSchema,
    NoInjectionPointer,
    PointerUnresolvable,
    RaggedCsv,
    NonFlatJson,
    EmptyDataset,
    DatasetTooLarge,
    UnknownColumn,
    NoMatch,
    StalePath,
    DivisionByZero,
    EmptyExampleSet,
    MissingSettings,
    BadManifest,
    NotFound,
    VersionConflict,
    Io,
};

std::string_view code_name(ErrorCode code);

/// Every engine failure is an ivy::Error. `detail` carries machine-readable
/// context (positions, parameter names, schema error lists) for the CLI's
/// --json-errors mode and the HTTP service.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, Json detail = Json::object());

    ErrorCode code() const noexcept { return code_; }
    const Json& detail() const noexcept { return detail_; }

    Json to_json() const;

private:
    ErrorCode code_;
    Json detail_;
};

}  // namespace ivy
