#include "ivy/service.hpp"

#include "ivy/data.hpp"
#include "ivy/evaluator.hpp"
#include "ivy/explore.hpp"
#include "ivy/parser.hpp"
#include "ivy/rewrite.hpp"

#include <httplib.h>

#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace ivy {

namespace {

void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(canonical(body) + "\n", "application/json");
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

Json request_json(const httplib::Request& req) {
    Json body = parse_json(req.body);
    if (!body.is_object()) throw Error(ErrorCode::BadSettingsShape, "request body must be a JSON object");
    return body;
}

std::optional<std::uint64_t> if_match(const httplib::Request& req) {
    if (!req.has_header("If-Match")) return std::nullopt;
    std::string v = req.get_header_value("If-Match");
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorCode::BadTemplateShape, "If-Match must be a template version number", {{"ifMatch", v}});
    }
    return std::stoull(v);
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::VersionConflict:
        case ErrorCode::DuplicateId: return 409;
        case ErrorCode::DatasetTooLarge: return 413;
        case ErrorCode::SettingsViolation:
        case ErrorCode::SchemaViolation:
        case ErrorCode::TopLevelBottom:
        case ErrorCode::UnknownLanguage:
        case ErrorCode::UnknownColumn:
        case ErrorCode::NoMatch:
        case ErrorCode::StalePath:
        case ErrorCode::NoInjectionPointer:
        case ErrorCode::PointerUnresolvable: return 422;
        case ErrorCode::Io:
        case ErrorCode::BadSchema: return 500;
        default: return 400;
    }
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
    ServiceConfig cfg;
    if (!path.empty()) {
        Json doc = parse_json(read_file(path));
        if (!doc.is_object()) throw Error(ErrorCode::BadManifest, "service config must be a JSON object");
        cfg.bind = doc.value("bind", cfg.bind);
        cfg.port = doc.value("port", cfg.port);
        if (doc.contains("storeDir")) {
            std::filesystem::path dir = doc.at("storeDir").get<std::string>();
            cfg.store_dir = dir.is_relative() ? path.parent_path() / dir : dir;
        }
        cfg.max_dataset_bytes = doc.value("maxDatasetBytes", cfg.max_dataset_bytes);
        cfg.fanout_jobs = doc.value("fanoutJobs", cfg.fanout_jobs);
    }
    if (const char* v = std::getenv("IVY_BIND"); v && *v) cfg.bind = v;
    if (const char* v = std::getenv("IVY_PORT"); v && *v) cfg.port = std::atoi(v);
    if (const char* v = std::getenv("IVY_STORE_DIR"); v && *v) cfg.store_dir = v;
    return cfg;
}

struct Service::Impl {
    ServiceConfig config;
    const LanguageRegistry& languages;
    TemplateStore store;
    httplib::Server server;

    std::shared_mutex datasets_mutex;
    std::map<std::string, std::shared_ptr<const Dataset>> datasets;

    Impl(ServiceConfig cfg, const LanguageRegistry& langs)
        : config(std::move(cfg)), languages(langs), store(config.store_dir) {
        routes();
    }

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static Handler guarded(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                h(req, res);
            } catch (const Error& e) {
                send(res, http_status(e.code()), e.to_json());
            } catch (const std::exception& e) {
                send(res, 500, Json{{"error", "Internal"}, {"message", e.what()}, {"detail", nullptr}});
            }
        };
    }

    Template resolve_template(const Json& body) const {
        if (!body.contains("template")) throw Error(ErrorCode::BadTemplateShape, "request needs \"template\"");
        const Json& ref = body.at("template");
        if (ref.is_object()) return template_from_json(ref);
        if (!ref.is_string()) throw Error(ErrorCode::BadTemplateShape, "\"template\" must be a name or a document");
        std::string name = ref.get<std::string>();
        auto st = body.contains("version") ? store.get(name, body.at("version").get<std::uint64_t>()) : store.latest(name);
        if (!st) throw Error(ErrorCode::NotFound, "no template named '" + name + "'", {{"name", name}});
        return st->tpl;
    }

    Settings resolve_settings(const Json& body) const {
        if (!body.contains("settings") || body.at("settings").is_null()) return {};
        return settings_from_json(body.at("settings"));
    }

    std::shared_ptr<const Dataset> resolve_dataset(const Json& body) {
        if (body.contains("datasetId")) {
            std::string id = body.at("datasetId").get<std::string>();
            std::shared_lock lock(datasets_mutex);
            auto it = datasets.find(id);
            if (it == datasets.end()) throw Error(ErrorCode::NotFound, "no dataset with id '" + id + "'", {{"datasetId", id}});
            return it->second;
        }
        if (!body.contains("dataset") || body.at("dataset").is_null()) return nullptr;
        const Json& d = body.at("dataset");
        if (d.is_array()) {
            return std::make_shared<const Dataset>(load_dataset(d.dump(), DataFormat::JsonArray, config.max_dataset_bytes));
        }
        if (d.is_object() && d.contains("content")) {
            std::string format = d.value("format", std::string("csv"));
            const Json& content = d.at("content");
            std::string bytes = content.is_string() ? content.get<std::string>() : content.dump();
            auto fmt = format == "json" ? DataFormat::JsonArray : DataFormat::Csv;
            return std::make_shared<const Dataset>(load_dataset(bytes, fmt, config.max_dataset_bytes));
        }
        throw Error(ErrorCode::NonFlatJson, "\"dataset\" must be a row array or {\"format\", \"content\"}");
    }

    void routes() {
        server.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, Json{{"status", "ok"}, {"languages", languages.ids()}, {"templates", store.list().size()}});
        }));

        server.Post("/templates", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Template t = parse_template(req.body);
            languages.get(t.language);
            auto diagnostics = lint_template(t);
            if (!diagnostics.empty()) {
                Json detail = Json::array();
                for (const auto& d : diagnostics) {
                    detail.push_back({{"kind", std::string(diagnostic_name(d.kind))}, {"name", d.name}, {"message", d.message}});
                }
                throw Error(ErrorCode::BadTemplateShape, "template does not lint clean", {{"diagnostics", detail}});
            }
            auto st = store.publish(std::move(t), if_match(req), req.get_header_value("X-Ivy-Owner"));
            res.set_header("ETag", "\"" + std::to_string(st.tpl.version) + "\"");
            res.status = 201;
            res.set_content(serialize_template(st.tpl), "application/json");
        }));

        server.Get("/templates", guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.has_param("roles")) {
                Json list = Json::array();
                for (const auto& st : store.list()) list.push_back(stored_info_to_json(st));
                send(res, 200, Json{{"templates", list}});
                return;
            }
            auto roles = split_commas(req.get_param_value("roles"));
            auto names = req.has_param("columns") ? split_commas(req.get_param_value("columns")) : std::vector<std::string>{};
            std::vector<ColumnQuery> query;
            for (std::size_t i = 0; i < roles.size(); ++i) {
                auto role = parse_role(roles[i]);
                if (!role) throw Error(ErrorCode::BadSettingsShape, "unknown data role '" + roles[i] + "'", {{"role", roles[i]}});
                std::string name = i < names.size() ? names[i] : "column" + std::to_string(i + 1);
                query.push_back({name, *role});
            }
            auto catalog = store.catalog();
            Json results = Json::array();
            for (const auto& hit : search_catalog(catalog, query)) {
                Json mapping = Json::object();
                for (const auto& [col, param] : hit.match.mapping) mapping[col] = param;
                results.push_back({{"name", hit.tpl->name},
                                   {"version", hit.tpl->version},
                                   {"match", std::string(match_name(hit.match.kind))},
                                   {"mapping", mapping},
                                   {"uncoveredRequired", hit.match.uncovered_required}});
            }
            send(res, 200, Json{{"results", results}});
        }));

        server.Get(R"(/templates/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::string name = req.matches[1];
            auto st = req.has_param("version") ? store.get(name, std::stoull(req.get_param_value("version")))
                                               : store.latest(name);
            if (!st) throw Error(ErrorCode::NotFound, "no template named '" + name + "'", {{"name", name}});
            res.set_header("ETag", "\"" + std::to_string(st->tpl.version) + "\"");
            res.status = 200;
            res.set_content(serialize_template(st->tpl), "application/json");
        }));

        server.Post(R"(/templates/([^/]+)/fork)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::string source = req.matches[1];
            Json body = request_json(req);
            if (!body.contains("name") || !body.at("name").is_string()) {
                throw Error(ErrorCode::BadTemplateShape, "fork request needs a new \"name\"");
            }
            auto st = store.fork(source, body.at("name").get<std::string>(), body.value("owner", std::string()));
            res.set_header("ETag", "\"1\"");
            res.status = 201;
            res.set_content(serialize_template(st.tpl), "application/json");
        }));

        server.Post("/apply", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Json body = request_json(req);
            Template t = resolve_template(body);
            Settings s = resolve_settings(body);
            auto d = resolve_dataset(body);
            Json spec = apply_template(t, s, d.get(), languages, ApplyOptions{body.value("validate", true)});
            send(res, 200, spec);
        }));

        server.Post("/fanout", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Json body = request_json(req);
            Template t = resolve_template(body);
            FanOutRequest fr;
            fr.template_name = t.name;
            fr.base = resolve_settings(body);
            if (!body.contains("optionSets") || !body.at("optionSets").is_object()) {
                throw Error(ErrorCode::BadSettingsShape, "fan-out request needs an \"optionSets\" object");
            }
            for (const auto& [name, values] : body.at("optionSets").items()) {
                if (!values.is_array()) {
                    throw Error(ErrorCode::BadSettingsShape, "option set for '" + name + "' must be a list", {{"parameter", name}});
                }
                std::vector<ArgumentValue> opts;
                for (const auto& v : values) opts.push_back(argument_from_json(v));
                fr.option_sets.emplace_back(name, std::move(opts));
            }
            auto d = resolve_dataset(body);
            FanOutOptions opts{config.fanout_jobs, body.value("validate", true)};
            auto cells = fan_out(t, fr, d.get(), languages, opts);
            send(res, 200, Json{{"template", t.name}, {"cells", fan_out_to_json(cells)}});
        }));

        server.Post("/suggest", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Json body = request_json(req);
            if (!body.contains("body") || !body.contains("language")) {
                throw Error(ErrorCode::BadTemplateShape, "suggest request needs \"body\" and \"language\"");
            }
            Expression expr = parse_body(body.at("body"));
            std::optional<std::vector<Column>> columns;
            if (body.contains("columns") && body.at("columns").is_array()) {
                columns.emplace();
                for (const auto& c : body.at("columns")) {
                    auto role = parse_role(c.at("role").get<std::string>());
                    if (!role) throw Error(ErrorCode::BadSettingsShape, "unknown data role", {{"column", c}});
                    columns->push_back({c.at("name").get<std::string>(), *role, false});
                }
            } else if (auto d = resolve_dataset(body)) {
                columns = d->columns;
            }
            Json list = Json::array();
            for (const auto& sg : suggest(expr, body.at("language").get<std::string>(), columns ? &*columns : nullptr, languages)) {
                list.push_back(suggestion_to_json(sg));
            }
            send(res, 200, Json{{"suggestions", list}});
        }));

        server.Post("/visible", guarded([this](const httplib::Request& req, httplib::Response& res) {
            Json body = request_json(req);
            Template t = resolve_template(body);
            send(res, 200, Json{{"visible", visible_params(t, resolve_settings(body))}});
        }));

        server.Post("/datasets", guarded([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.is_multipart_form_data() || !req.has_file("file")) {
                throw Error(ErrorCode::EmptyDataset, "upload the dataset as multipart field \"file\"");
            }
            const auto& file = req.get_file_value("file");
            std::string format = req.has_file("format") ? req.get_file_value("format").content : "";
            if (format.empty()) {
                bool json_name = file.filename.size() >= 5 && file.filename.substr(file.filename.size() - 5) == ".json";
                format = json_name ? "json" : "csv";
            }
            auto d = std::make_shared<const Dataset>(
                load_dataset(file.content, format == "json" ? DataFormat::JsonArray : DataFormat::Csv, config.max_dataset_bytes));
            std::string id = sha256_hex(file.content).substr(0, 16);
            {
                std::unique_lock lock(datasets_mutex);
                datasets[id] = d;
            }
            Json cols = Json::array();
            for (const auto& c : d->columns) cols.push_back({{"name", c.name}, {"role", std::string(role_name(c.role))}});
            send(res, 201, Json{{"id", id}, {"columns", cols}, {"rowCount", d->rows.size()}});
        }));
    }
};

Service::Service(ServiceConfig config, const LanguageRegistry& languages)
    : impl_(std::make_unique<Impl>(std::move(config), languages)) {}

Service::~Service() = default;

bool Service::listen() {
    return impl_->server.listen(impl_->config.bind, impl_->config.port);
}

int Service::bind_ephemeral() {
    return impl_->server.bind_to_any_port(impl_->config.bind);
}

bool Service::listen_after_bind() {
    return impl_->server.listen_after_bind();
}

void Service::stop() {
    impl_->server.stop();
}

void Service::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

TemplateStore& Service::store() {
    return impl_->store;
}

}  // namespace ivy
