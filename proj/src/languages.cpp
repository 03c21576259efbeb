#include "ivy/languages.hpp"

#include "ivy/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef IVY_DEFAULT_DATA_DIR
#define IVY_DEFAULT_DATA_DIR "data"
#endif

namespace ivy {

namespace {

std::vector<std::string> pointer_tokens(const std::string& pointer) {
    std::vector<std::string> tokens;
    if (pointer.empty()) return tokens;
    if (pointer.front() != '/') {
        throw Error(ErrorCode::PointerUnresolvable, "JSON pointer must start with '/': " + pointer);
    }
    std::string cur;
    for (std::size_t i = 1; i <= pointer.size(); ++i) {
        if (i == pointer.size() || pointer[i] == '/') {
            tokens.push_back(cur);
            cur.clear();
        } else if (pointer[i] == '~' && i + 1 < pointer.size() && (pointer[i + 1] == '0' || pointer[i + 1] == '1')) {
            cur += pointer[i + 1] == '0' ? '~' : '/';
            ++i;
        } else {
            cur += pointer[i];
        }
    }
    return tokens;
}

const Json* step(const Json& v, const std::string& token) {
    if (v.is_object()) {
        auto it = v.find(token);
        return it == v.end() ? nullptr : &*it;
    }
    if (v.is_array()) {
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) return nullptr;
        auto idx = std::stoul(token);
        return idx < v.size() ? &v[idx] : nullptr;
    }
    return nullptr;
}

}  // namespace

LanguageRegistry::LanguageRegistry(Json meta_schema)
    : meta_(std::make_shared<const SchemaValidator>(std::move(meta_schema))) {}

void LanguageRegistry::register_language(LanguageSpec spec) {
    if (spec.id.empty()) throw Error(ErrorCode::BadSchema, "language id must not be empty");
    if (entries_.count(spec.id)) {
        throw Error(ErrorCode::DuplicateId, "language '" + spec.id + "' is already registered", {{"id", spec.id}});
    }
    auto meta_errors = meta_->validate(spec.schema);
    if (!meta_errors.empty()) {
        throw Error(ErrorCode::BadSchema, "schema for '" + spec.id + "' is not a valid JSON Schema",
                    {{"errors", schema_errors_to_json(meta_errors)}});
    }
    if (spec.data_injection_pointer) pointer_tokens(*spec.data_injection_pointer);
    auto validator = std::make_shared<const SchemaValidator>(spec.schema);
    std::string id = spec.id;
    entries_.emplace(std::move(id), Entry{std::move(spec), std::move(validator)});
}

const LanguageRegistry::Entry& LanguageRegistry::entry(std::string_view id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) {
        throw Error(ErrorCode::UnknownLanguage, "unknown language '" + std::string(id) + "'", {{"language", std::string(id)}});
    }
    return it->second;
}

const LanguageSpec* LanguageRegistry::find(std::string_view id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second.spec;
}

const LanguageSpec& LanguageRegistry::get(std::string_view id) const {
    return entry(id).spec;
}

std::vector<std::string> LanguageRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) out.push_back(id);
    return out;
}

std::vector<SchemaError> LanguageRegistry::validate_spec(std::string_view id, const Json& spec) const {
    return entry(id).validator->validate(spec);
}

Json LanguageRegistry::inject_data(std::string_view id, Json spec, const std::vector<Json>& rows) const {
    const auto& e = entry(id);
    if (!e.spec.data_injection_pointer) {
        throw Error(ErrorCode::NoInjectionPointer, "language '" + std::string(id) + "' has no data injection pointer");
    }
    auto tokens = pointer_tokens(*e.spec.data_injection_pointer);
    if (tokens.empty()) throw Error(ErrorCode::PointerUnresolvable, "data injection pointer must not be the document root");

    // Any existing value along the pointer counts as a data binding; every
    // longer prefix passes through the first token.
    if (step(spec, tokens.front())) return spec;

    if (!spec.is_object()) {
        throw Error(ErrorCode::PointerUnresolvable, "cannot inject data into a non-object spec",
                    {{"pointer", *e.spec.data_injection_pointer}});
    }
    Json* slot = &spec;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        slot = &(*slot)[tokens[i]];
        if (slot->is_null()) *slot = Json::object();
    }
    (*slot)[tokens.back()] = Json(rows);
    return spec;
}

LanguageRegistry LanguageRegistry::load_manifest(const std::filesystem::path& manifest) {
    Json doc = parse_json(read_file(manifest));
    auto base = manifest.parent_path();
    if (!doc.is_object() || !doc.contains("metaSchema") || !doc.contains("languages") || !doc.at("languages").is_array()) {
        throw Error(ErrorCode::BadSchema, "language manifest needs \"metaSchema\" and \"languages\"");
    }

    auto load_pinned = [&](const Json& ref, const std::string& what) {
        if (!ref.is_object() || !ref.contains("path") || !ref.contains("sha256")) {
            throw Error(ErrorCode::BadSchema, what + ": schema reference needs \"path\" and \"sha256\"");
        }
        std::string bytes = read_file(base / ref.at("path").get<std::string>());
        std::string digest = sha256_hex(bytes);
        if (digest != ref.at("sha256").get<std::string>()) {
            throw Error(ErrorCode::BadSchema, what + ": schema digest mismatch",
                        {{"expected", ref.at("sha256")}, {"actual", digest}});
        }
        return parse_json(bytes);
    };

    LanguageRegistry registry(load_pinned(doc.at("metaSchema"), "meta-schema"));
    for (const auto& lang : doc.at("languages")) {
        LanguageSpec spec;
        spec.id = lang.at("id").get<std::string>();
        spec.display_name = lang.value("displayName", spec.id);
        spec.schema = load_pinned(lang.at("schema"), "language '" + spec.id + "'");
        if (lang.contains("dataInjectionPointer") && !lang.at("dataInjectionPointer").is_null()) {
            spec.data_injection_pointer = lang.at("dataInjectionPointer").get<std::string>();
        }
        spec.rewrite_rule_set = lang.value("rewriteRules", spec.id);
        registry.register_language(std::move(spec));
    }
    return registry;
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("IVY_DATA_DIR"); env && *env) return env;
    return IVY_DEFAULT_DATA_DIR;
}

std::filesystem::path default_language_manifest() {
    return default_data_dir() / "languages" / "manifest.json";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string(), {{"path", path.string()}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string(), {{"path", path.string()}});
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string(), {{"path", path.string()}});
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace ivy
