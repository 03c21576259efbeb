#include "ivy/error.hpp"

namespace ivy {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::JsonSyntax: return "JsonSyntax";
        case ErrorCode::UnknownTopLevelKey: return "UnknownTopLevelKey";
        case ErrorCode::BadParamType: return "BadParamType";
        case ErrorCode::BadPredicate: return "BadPredicate";
        case ErrorCode::BadConditionalShape: return "BadConditionalShape";
        case ErrorCode::BadSettingsShape: return "BadSettingsShape";
        case ErrorCode::BadFilterShape: return "BadFilterShape";
        case ErrorCode::BadTemplateShape: return "BadTemplateShape";
        case ErrorCode::SettingsViolation: return "SettingsViolation";
        case ErrorCode::TopLevelBottom: return "TopLevelBottom";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::UnknownLanguage: return "UnknownLanguage";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::BadSchema: return "BadSchema";
        case ErrorCode::NoInjectionPointer: return "NoInjectionPointer";
        case ErrorCode::PointerUnresolvable: return "PointerUnresolvable";
        case ErrorCode::RaggedCsv: return "RaggedCsv";
        case ErrorCode::NonFlatJson: return "NonFlatJson";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DatasetTooLarge: return "DatasetTooLarge";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::NoMatch: return "NoMatch";
        case ErrorCode::StalePath: return "StalePath";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::EmptyExampleSet: return "EmptyExampleSet";
        case ErrorCode::MissingSettings: return "MissingSettings";
        case ErrorCode::BadManifest: return "BadManifest";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::VersionConflict: return "VersionConflict";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string message, Json detail)
    : std::runtime_error(std::move(message)), code_(code), detail_(std::move(detail)) {}

Json Error::to_json() const {
    Json out = Json::object();
    out["error"] = std::string(code_name(code_));
    out["message"] = what();
    if (!detail_.empty()) out["detail"] = detail_;
    return out;
}

}  // namespace ivy
