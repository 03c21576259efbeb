#include "ivy/store.hpp"

#include "ivy/error.hpp"
#include "ivy/languages.hpp"
#include "ivy/parser.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

namespace ivy {

namespace {

constexpr const char* kLogFile = "log.jsonl";

void check_name(const std::string& name) {
    static const std::regex pattern(R"(^[A-Za-z0-9][A-Za-z0-9_.\-]{0,127}$)");
    if (!std::regex_match(name, pattern)) {
        throw Error(ErrorCode::BadTemplateShape,
                    "template name '" + name + "' must be letters, digits, '_', '.' or '-' and start alphanumeric",
                    {{"name", name}});
    }
}

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path version_file(const std::string& name, std::uint64_t version) {
    return std::filesystem::path("templates") / name / (std::to_string(version) + ".ivy.json");
}

Json log_entry(const StoredTemplate& st) {
    Json e = stored_info_to_json(st);
    e["file"] = version_file(st.tpl.name, st.tpl.version).generic_string();
    return e;
}

}  // namespace

Json stored_info_to_json(const StoredTemplate& st) {
    Json out = Json::object();
    out["name"] = st.tpl.name;
    out["version"] = st.tpl.version;
    out["language"] = st.tpl.language;
    out["description"] = st.tpl.description;
    out["owner"] = st.owner;
    out["createdAt"] = st.created_at;
    if (st.fork_of) {
        out["forkOf"] = {{"name", st.fork_of->first}, {"version", st.fork_of->second}};
    } else {
        out["forkOf"] = nullptr;
    }
    return out;
}

TemplateStore::TemplateStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "templates", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create store directory " + dir_.string() + ": " + ec.message());
    replay();
}

void TemplateStore::replay() {
    std::ifstream in(dir_ / kLogFile);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json e;
        try {
            e = parse_json(line);
        } catch (const Error&) {
            // A torn final line from an interrupted append was never acknowledged.
            break;
        }
        StoredTemplate st;
        st.tpl = parse_template(read_file(dir_ / e.at("file").get<std::string>()));
        st.owner = e.value("owner", std::string());
        st.created_at = e.value("createdAt", std::string());
        if (e.contains("forkOf") && e.at("forkOf").is_object()) {
            st.fork_of = std::make_pair(e.at("forkOf").at("name").get<std::string>(),
                                        e.at("forkOf").at("version").get<std::uint64_t>());
        }
        std::string name = st.tpl.name;
        versions_[name].push_back(std::make_shared<const StoredTemplate>(std::move(st)));
    }
}

StoredTemplate TemplateStore::commit(StoredTemplate st) {
    if (!dir_.empty()) {
        auto rel = version_file(st.tpl.name, st.tpl.version);
        auto target = dir_ / rel;
        std::filesystem::create_directories(target.parent_path());
        auto tmp = target;
        tmp += ".tmp";
        write_file(tmp, serialize_template(st.tpl));
        std::filesystem::rename(tmp, target);

        std::ofstream log(dir_ / kLogFile, std::ios::app | std::ios::binary);
        log << log_entry(st).dump() << '\n';
        log.flush();
        if (!log) throw Error(ErrorCode::Io, "cannot append to the store log");
    }
    auto ptr = std::make_shared<const StoredTemplate>(std::move(st));
    {
        std::unique_lock lock(mutex_);
        versions_[ptr->tpl.name].push_back(ptr);
    }
    return *ptr;
}

StoredTemplate TemplateStore::publish(Template t, std::optional<std::uint64_t> expected_version, std::string owner) {
    check_name(t.name);
    std::lock_guard writer(write_mutex_);
    std::uint64_t current = 0;
    if (auto cur = latest(t.name)) current = cur->tpl.version;
    if (expected_version && *expected_version != current) {
        throw Error(ErrorCode::VersionConflict,
                    "template '" + t.name + "' is at version " + std::to_string(current) + ", not " +
                        std::to_string(*expected_version),
                    {{"name", t.name}, {"current", current}, {"expected", *expected_version}});
    }
    t.version = current + 1;
    StoredTemplate st{std::move(t), std::move(owner), now_utc(), std::nullopt};
    return commit(std::move(st));
}

StoredTemplate TemplateStore::fork(std::string_view source, std::string new_name, std::string owner) {
    check_name(new_name);
    std::lock_guard writer(write_mutex_);
    auto src = latest(source);
    if (!src) throw Error(ErrorCode::NotFound, "no template named '" + std::string(source) + "'", {{"name", std::string(source)}});
    if (latest(new_name)) {
        throw Error(ErrorCode::VersionConflict, "template '" + new_name + "' already exists", {{"name", new_name}});
    }
    StoredTemplate st;
    st.tpl = src->tpl;
    st.tpl.name = std::move(new_name);
    st.tpl.version = 1;
    st.owner = std::move(owner);
    st.created_at = now_utc();
    st.fork_of = std::make_pair(src->tpl.name, src->tpl.version);
    return commit(std::move(st));
}

std::optional<StoredTemplate> TemplateStore::latest(std::string_view name) const {
    std::shared_lock lock(mutex_);
    auto it = versions_.find(name);
    if (it == versions_.end() || it->second.empty()) return std::nullopt;
    return *it->second.back();
}

std::optional<StoredTemplate> TemplateStore::get(std::string_view name, std::uint64_t version) const {
    std::shared_lock lock(mutex_);
    auto it = versions_.find(name);
    if (it == versions_.end()) return std::nullopt;
    for (const auto& v : it->second) {
        if (v->tpl.version == version) return *v;
    }
    return std::nullopt;
}

std::vector<StoredTemplate> TemplateStore::list() const {
    std::shared_lock lock(mutex_);
    std::vector<StoredTemplate> out;
    for (const auto& [name, versions] : versions_) {
        if (!versions.empty()) out.push_back(*versions.back());
    }
    return out;
}

std::vector<Template> TemplateStore::catalog() const {
    std::vector<Template> out;
    for (auto& st : list()) out.push_back(std::move(st.tpl));
    return out;
}

}  // namespace ivy
