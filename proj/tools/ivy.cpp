// Command-line front end: apply, fanout, search, suggest, templatize,
// validate, stats and serve.
#include "ivy/data.hpp"
#include "ivy/error.hpp"
#include "ivy/evaluator.hpp"
#include "ivy/explore.hpp"
#include "ivy/languages.hpp"
#include "ivy/metrics.hpp"
#include "ivy/parser.hpp"
#include "ivy/rewrite.hpp"
#include "ivy/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ivy;

namespace {

struct Options {
    bool json_errors = false;
    std::string languages_manifest;

    std::string tpl, settings, data, data_format, out, body, language, catalog, roles, columns, manifest, config, name;
    std::vector<std::string> sets;
    bool validate = false;
    bool apply_all = false;
    bool table = false;
    unsigned jobs = 0;
};

LanguageRegistry load_languages(const Options& o) {
    return LanguageRegistry::load_manifest(o.languages_manifest.empty() ? default_language_manifest()
                                                                        : fs::path(o.languages_manifest));
}

void emit(const Json& value, const std::string& out) {
    std::string text = canonical(value) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

std::optional<Dataset> load_data(const Options& o) {
    if (o.data.empty()) return std::nullopt;
    std::string format = o.data_format;
    if (format.empty()) format = fs::path(o.data).extension() == ".json" ? "json" : "csv";
    return load_dataset(read_file(o.data), format == "json" ? DataFormat::JsonArray : DataFormat::Csv);
}

Settings load_settings_file(const std::string& path) {
    return path.empty() ? Settings{} : parse_settings(read_file(path));
}

ArgumentValue coerce(const Parameter& p, const std::string& text) {
    if (text == "null") return ArgumentValue();
    if (std::holds_alternative<param::Number>(p.type)) {
        Json v = parse_json(text);
        if (!v.is_number()) {
            throw Error(ErrorCode::BadSettingsShape, "'" + text + "' is not a number for '" + p.name + "'",
                        {{"parameter", p.name}, {"value", text}});
        }
        return ArgumentValue(v);
    }
    if (std::holds_alternative<param::Boolean>(p.type)) {
        if (text != "true" && text != "false") {
            throw Error(ErrorCode::BadSettingsShape, "'" + text + "' is not true or false for '" + p.name + "'",
                        {{"parameter", p.name}, {"value", text}});
        }
        return ArgumentValue(Json(text == "true"));
    }
    if (std::holds_alternative<param::MultiDataTarget>(p.type)) {
        // Columns of one option are joined with '+'.
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == '+') {
                cols.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        return ArgumentValue(std::move(cols));
    }
    return ArgumentValue(Json(text));
}

FanOutRequest parse_sets(const Template& t, const Settings& base, const std::vector<std::string>& sets) {
    FanOutRequest req;
    req.template_name = t.name;
    req.base = base;
    for (const auto& spec : sets) {
        auto eq = spec.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected param=v1,v2,... but got '" + spec + "'");
        std::string name = spec.substr(0, eq);
        const auto* p = t.find_param(name);
        if (!p) throw CLI::ValidationError("--set", "template has no parameter '" + name + "'");
        std::vector<ArgumentValue> values;
        std::string rest = spec.substr(eq + 1);
        std::size_t start = 0;
        for (std::size_t i = 0; i <= rest.size(); ++i) {
            if (i == rest.size() || rest[i] == ',') {
                values.push_back(coerce(*p, rest.substr(start, i - start)));
                start = i + 1;
            }
        }
        req.option_sets.emplace_back(name, std::move(values));
    }
    return req;
}

std::vector<Template> load_catalog(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 9 && name.substr(name.size() - 9) == ".ivy.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<Template> out;
    for (const auto& f : files) out.push_back(parse_template(read_file(f)));
    return out;
}

std::vector<ColumnQuery> parse_query(const std::string& roles, const std::string& columns) {
    std::vector<std::string> role_list, names;
    auto split = [](const std::string& text, std::vector<std::string>& out) {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ',') {
                if (i > start) out.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
    };
    split(roles, role_list);
    split(columns, names);
    std::vector<ColumnQuery> query;
    for (std::size_t i = 0; i < role_list.size(); ++i) {
        auto role = parse_role(role_list[i]);
        if (!role) throw CLI::ValidationError("--roles", "unknown data role '" + role_list[i] + "'");
        query.push_back({i < names.size() ? names[i] : "column" + std::to_string(i + 1), *role});
    }
    return query;
}

int run_apply(const Options& o) {
    auto languages = load_languages(o);
    Template t = parse_template(read_file(o.tpl));
    Settings s = load_settings_file(o.settings);
    auto d = load_data(o);
    emit(apply_template(t, s, d ? &*d : nullptr, languages, ApplyOptions{o.validate}), o.out);
    return 0;
}

int run_fanout(const Options& o) {
    auto languages = load_languages(o);
    Template t = parse_template(read_file(o.tpl));
    auto req = parse_sets(t, load_settings_file(o.settings), o.sets);
    auto d = load_data(o);
    auto cells = fan_out(t, req, d ? &*d : nullptr, languages, FanOutOptions{o.jobs, o.validate});

    fs::create_directories(o.out);
    Json index = Json::array();
    bool any_failed = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string file = fan_out_file_name(i, cells[i].settings);
        Json entry = {{"index", i}, {"file", file}, {"settings", settings_to_json(cells[i].settings)}};
        if (cells[i].spec) {
            write_file(fs::path(o.out) / file, canonical(*cells[i].spec) + "\n");
        } else {
            any_failed = true;
            entry["error"] = *cells[i].error;
        }
        index.push_back(std::move(entry));
    }
    write_file(fs::path(o.out) / "index.json", canonical(index) + "\n");
    emit(index, "");
    return any_failed ? 1 : 0;
}

int run_search(const Options& o) {
    auto catalog = load_catalog(o.catalog);
    auto query = parse_query(o.roles, o.columns);
    auto hits = search_catalog(catalog, query);
    if (!o.table) {
        Json out = Json::array();
        for (const auto& h : hits) {
            Json mapping = Json::object();
            for (const auto& [c, p] : h.match.mapping) mapping[c] = p;
            out.push_back({{"name", h.tpl->name},
                           {"match", std::string(match_name(h.match.kind))},
                           {"mapping", mapping},
                           {"uncoveredRequired", h.match.uncovered_required}});
        }
        emit(out, "");
        return 0;
    }
    std::printf("%-4s %-28s %-9s %s\n", "rank", "template", "match", "mapping");
    for (std::size_t i = 0; i < hits.size(); ++i) {
        std::string mapping;
        for (const auto& [c, p] : hits[i].match.mapping) mapping += (mapping.empty() ? "" : ", ") + c + "->" + p;
        std::printf("%-4zu %-28s %-9s %s\n", i + 1, hits[i].tpl->name.c_str(),
                    std::string(match_name(hits[i].match.kind)).c_str(), mapping.c_str());
    }
    return 0;
}

Expression load_body(const Options& o) {
    return parse_body(parse_json(read_file(o.body)));
}

int run_suggest(const Options& o) {
    auto languages = load_languages(o);
    auto d = load_data(o);
    Json out = Json::array();
    for (const auto& sg : suggest(load_body(o), o.language, d ? &d->columns : nullptr, languages)) {
        out.push_back(suggestion_to_json(sg));
    }
    emit(out, o.out);
    return 0;
}

int run_templatize(const Options& o) {
    auto languages = load_languages(o);
    auto d = load_data(o);
    Template t;
    t.name = o.name.empty() ? fs::path(o.body).stem().stem().string() : o.name;
    t.description = "Templatized from " + fs::path(o.body).filename().string();
    t.language = o.language;
    t.body = load_body(o);
    if (o.apply_all) {
        for (const auto& sg : suggest(t.body, o.language, d ? &d->columns : nullptr, languages)) t = apply_suggestion(t, sg);
    }
    t.version = 1;
    std::string text = serialize_template(t);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_file(o.out, text);
    }
    return 0;
}

int run_validate(const Options& o) {
    Template t = parse_template(read_file(o.tpl));
    Json out = Json::array();
    for (const auto& d : lint_template(t)) {
        out.push_back({{"kind", std::string(diagnostic_name(d.kind))}, {"name", d.name}, {"message", d.message}});
    }
    emit(out, "");
    return out.empty() ? 0 : 1;
}

int run_stats(const Options& o) {
    Json report = verify_coverage(o.manifest);
    if (o.table) {
        std::cout << coverage_table(report);
    } else {
        emit(report, o.out);
    }
    return report.at("summary").at("failed").get<std::size_t>() == 0 ? 0 : 1;
}

int run_serve(const Options& o) {
    std::string cfg_path = o.config;
    if (cfg_path.empty()) {
        if (const char* env = std::getenv("IVY_CONFIG"); env && *env) cfg_path = env;
    }
    auto languages = load_languages(o);
    Service service(load_service_config(cfg_path), languages);
    std::cerr << "serving\n";
    if (!service.listen()) {
        throw Error(ErrorCode::Io, "cannot bind the configured address");
    }
    return 0;
}

void report(const Options& o, const Json& err) {
    if (o.json_errors) {
        std::cerr << canonical(err) << "\n";
    } else {
        std::cerr << "error: " << err.at("error").get<std::string>() << ": " << err.at("message").get<std::string>()
                  << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Parameterized declarative template engine"};
    app.require_subcommand(1);
    app.add_flag("--json-errors", o.json_errors, "Print errors as JSON on stderr");
    app.add_option("--languages", o.languages_manifest, "Language manifest (default: bundled)");

    auto data_opts = [&](CLI::App* sub) {
        sub->add_option("-d,--data", o.data, "Dataset (CSV or JSON array)");
        sub->add_option("--data-format", o.data_format, "csv or json (default: by extension)")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* apply = app.add_subcommand("apply", "Instantiate a template");
    apply->add_option("-t,--template", o.tpl, "Template document")->required();
    apply->add_option("-s,--settings", o.settings, "Settings document")->required();
    data_opts(apply);
    apply->add_flag("--validate", o.validate, "Validate the output against the language schema");
    apply->add_option("-o,--out", o.out, "Output file (default: stdout)");

    auto* fanout = app.add_subcommand("fanout", "Instantiate every combination of option sets");
    fanout->add_option("-t,--template", o.tpl, "Template document")->required();
    fanout->add_option("-s,--settings", o.settings, "Base settings document")->required();
    fanout->add_option("--set", o.sets, "param=v1,v2,... (repeatable)")->required();
    data_opts(fanout);
    fanout->add_option("-o,--out", o.out, "Output directory")->required();
    fanout->add_option("--jobs", o.jobs, "Worker threads (default: logical cores)");
    fanout->add_flag("--validate", o.validate, "Validate each output against the language schema");

    auto* search = app.add_subcommand("search", "Rank catalog templates for a set of column roles");
    search->add_option("--catalog", o.catalog, "Directory of *.ivy.json templates")->required()->check(CLI::ExistingDirectory);
    search->add_option("--roles", o.roles, "Comma-separated roles, e.g. Measure,Dimension")->required();
    search->add_option("--columns", o.columns, "Comma-separated column names for the roles");
    search->add_flag("--table", o.table, "Print a ranked table instead of JSON");

    auto* suggest_cmd = app.add_subcommand("suggest", "List templatization suggestions for a raw spec");
    suggest_cmd->add_option("-b,--body", o.body, "Raw spec")->required();
    suggest_cmd->add_option("-l,--language", o.language, "Language id")->required();
    data_opts(suggest_cmd);
    suggest_cmd->add_option("-o,--out", o.out, "Output file (default: stdout)");

    auto* templatize = app.add_subcommand("templatize", "Turn a raw spec into a template");
    templatize->add_option("-b,--body", o.body, "Raw spec")->required();
    templatize->add_option("-l,--language", o.language, "Language id")->required();
    templatize->add_flag("--apply-all", o.apply_all, "Apply every suggestion");
    templatize->add_option("--name", o.name, "Template name (default: file stem)");
    data_opts(templatize);
    templatize->add_option("-o,--out", o.out, "Output file (default: stdout)");

    auto* validate = app.add_subcommand("validate", "Lint a template document");
    validate->add_option("-t,--template", o.tpl, "Template document")->required();

    auto* stats = app.add_subcommand("stats", "Verify corpus coverage and report compression");
    stats->add_option("--manifest", o.manifest, "Corpus manifest")->required();
    stats->add_flag("--table", o.table, "Print a table instead of JSON");
    stats->add_option("-o,--out", o.out, "Output file (default: stdout)");

    auto* serve = app.add_subcommand("serve", "Run the registry service");
    serve->add_option("--config", o.config, "Service config (default: $IVY_CONFIG)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*apply) return run_apply(o);
        if (*fanout) return run_fanout(o);
        if (*search) return run_search(o);
        if (*suggest_cmd) return run_suggest(o);
        if (*templatize) return run_templatize(o);
        if (*validate) return run_validate(o);
        if (*stats) return run_stats(o);
        if (*serve) return run_serve(o);
    } catch (const CLI::ValidationError& e) {
        report(o, Json{{"error", "Usage"}, {"message", e.what()}, {"detail", nullptr}});
        return 2;
    } catch (const Error& e) {
        report(o, e.to_json());
        return 1;
    } catch (const std::exception& e) {
        report(o, Json{{"error", "Internal"}, {"message", e.what()}, {"detail", nullptr}});
        return 1;
    }
    return 2;
}
