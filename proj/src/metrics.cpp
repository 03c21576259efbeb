#include "ivy/metrics.hpp"

#include "ivy/error.hpp"
#include "ivy/evaluator.hpp"
#include "ivy/languages.hpp"
#include "ivy/parser.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace ivy {

namespace {

void diff_into(const Json& a, const Json& b, const std::string& path, Json& out, std::size_t limit) {
    if (out.size() >= limit) return;
    if (a.is_object() && b.is_object()) {
        std::vector<std::string> ka, kb;
        for (const auto& [k, v] : a.items()) ka.push_back(k);
        for (const auto& [k, v] : b.items()) kb.push_back(k);
        if (ka != kb) {
            // Report key order and membership differences at this level.
            bool same_members = std::is_permutation(ka.begin(), ka.end(), kb.begin(), kb.end());
            if (same_members) {
                out.push_back({{"pointer", path}, {"problem", "key order"}, {"expected", ka}, {"actual", kb}});
                return;
            }
        }
        for (const auto& k : ka) {
            std::string child = path + "/" + pointer_escape(k);
            if (!b.contains(k)) {
                out.push_back({{"pointer", child}, {"problem", "missing"}, {"expected", a.at(k)}, {"actual", nullptr}});
            } else {
                diff_into(a.at(k), b.at(k), child, out, limit);
            }
            if (out.size() >= limit) return;
        }
        for (const auto& k : kb) {
            if (!a.contains(k) && out.size() < limit) {
                out.push_back({{"pointer", path + "/" + pointer_escape(k)}, {"problem", "unexpected"},
                               {"expected", nullptr}, {"actual", b.at(k)}});
            }
        }
        return;
    }
    if (a.is_array() && b.is_array() && a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) diff_into(a[i], b[i], path + "/" + std::to_string(i), out, limit);
        return;
    }
    if (a != b) out.push_back({{"pointer", path}, {"problem", "value"}, {"expected", a}, {"actual", b}});
}

void erase_pointer(Json& doc, const std::string& pointer) {
    try {
        Json::json_pointer ptr(pointer);
        if (ptr.empty()) return;
        Json& parent = doc.at(ptr.parent_pointer());
        const std::string last = ptr.back();
        if (parent.is_object()) {
            parent.erase(last);
        } else if (parent.is_array()) {
            parent.erase(static_cast<std::size_t>(std::stoul(last)));
        }
    } catch (const std::exception&) {
        // Absent paths have nothing to ignore.
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

double compression_ratio(std::size_t n_examples, std::size_t n_excluded, std::size_t n_templates) {
    if (n_templates == 0) throw Error(ErrorCode::DivisionByZero, "compression ratio needs at least one template");
    if (n_excluded > n_examples) {
        throw Error(ErrorCode::BadManifest, "more excluded examples than examples",
                    {{"examples", n_examples}, {"excluded", n_excluded}});
    }
    return static_cast<double>(n_examples - n_excluded) / static_cast<double>(n_templates);
}

std::string_view measure_name(SizeMeasure m) {
    return m == SizeMeasure::Loc ? "LOC" : "AST";
}

std::size_t ast_size(const Json& v) {
    if (v.is_object()) {
        std::size_t n = 1;
        for (const auto& [k, child] : v.items()) n += 1 + ast_size(child);
        return n;
    }
    if (v.is_array()) {
        std::size_t n = 1;
        for (const auto& child : v) n += ast_size(child);
        return n;
    }
    return 1;
}

std::size_t ast_size(const Expression& e) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Json>) {
                return 1;
            } else if constexpr (std::is_same_v<T, ObjectExpr>) {
                std::size_t total = 1;
                for (const auto& v : n.values) total += 1 + ast_size(v);
                return total;
            } else if constexpr (std::is_same_v<T, ListExpr>) {
                std::size_t total = 1;
                for (const auto& v : n.items) total += ast_size(v);
                return total;
            } else if constexpr (std::is_same_v<T, VariableRef>) {
                return 1;
            } else if constexpr (std::is_same_v<T, InterpolatedString>) {
                return n.segments.size();
            } else {
                std::size_t total = 1;
                if (n.then_branch) total += ast_size(*n.then_branch);
                if (n.else_branch) total += ast_size(*n.else_branch);
                return total;
            }
        },
        e.node());
}

std::size_t loc_size(const Json& v) {
    auto text = canonical(v);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
}

std::size_t loc_size(const Expression& e) {
    return loc_size(serialize_body(e));
}

double concatenation_ratio(const std::vector<Json>& examples, const Expression& template_body, SizeMeasure measure) {
    if (examples.empty()) throw Error(ErrorCode::EmptyExampleSet, "concatenation ratio needs at least one example");
    std::size_t total = 0;
    for (const auto& ex : examples) total += measure == SizeMeasure::Loc ? loc_size(ex) : ast_size(ex);
    std::size_t denom = measure == SizeMeasure::Loc ? loc_size(template_body) : ast_size(template_body);
    if (denom == 0) throw Error(ErrorCode::DivisionByZero, "template has size zero");
    return static_cast<double>(total) / static_cast<double>(denom);
}

Json structural_diff(const Json& expected, const Json& actual, std::size_t limit) {
    Json out = Json::array();
    diff_into(expected, actual, "", out, limit);
    return out;
}

Json verify_coverage(const std::filesystem::path& manifest_path) {
    Json manifest = parse_json(read_file(manifest_path));
    auto base = manifest_path.parent_path();
    if (!manifest.is_object() || !manifest.contains("examples") || !manifest.at("examples").is_array() ||
        !manifest.contains("templates") || !manifest.at("templates").is_array()) {
        throw Error(ErrorCode::BadManifest, "manifest needs \"templates\" and \"examples\" lists");
    }

    std::map<std::string, Template> templates;
    std::vector<std::string> template_order;
    for (const auto& rel : manifest.at("templates")) {
        Template t = parse_template(read_file(base / rel.get<std::string>()));
        template_order.push_back(t.name);
        templates.emplace(t.name, std::move(t));
    }

    Json rows = Json::array();
    std::map<std::string, std::vector<Json>> covered;
    std::size_t excluded = 0, passed = 0, failed = 0;
    for (const auto& ex : manifest.at("examples")) {
        std::string id = ex.at("id").get<std::string>();
        std::string by = ex.value("coveredBy", std::string());
        Json row = Json::object();
        row["id"] = id;
        if (by == "excluded") {
            ++excluded;
            row["status"] = "excluded";
            row["reason"] = ex.value("reason", std::string());
            rows.push_back(std::move(row));
            continue;
        }
        auto it = templates.find(by);
        if (it == templates.end()) {
            throw Error(ErrorCode::NotFound, "example '" + id + "' names unknown template '" + by + "'",
                        {{"example", id}, {"template", by}});
        }
        if (!ex.contains("settings") || !ex.at("settings").is_string()) {
            throw Error(ErrorCode::MissingSettings, "example '" + id + "' has no settings file", {{"example", id}});
        }
        Json expected = parse_json(read_file(base / ex.at("spec").get<std::string>()));
        Settings s = parse_settings(read_file(base / ex.at("settings").get<std::string>()));
        covered[by].push_back(expected);

        row["template"] = by;
        Json actual;
        try {
            actual = instantiate(it->second, s);
        } catch (const Error& e) {
            ++failed;
            row["status"] = "fail";
            row["error"] = e.to_json();
            rows.push_back(std::move(row));
            continue;
        }
        Json lhs = expected, rhs = actual;
        if (ex.contains("ignorePaths")) {
            for (const auto& p : ex.at("ignorePaths")) {
                erase_pointer(lhs, p.get<std::string>());
                erase_pointer(rhs, p.get<std::string>());
            }
        }
        if (canonical(lhs) == canonical(rhs)) {
            ++passed;
            row["status"] = "pass";
        } else {
            ++failed;
            row["status"] = "fail";
            row["diff"] = structural_diff(lhs, rhs);
        }
        rows.push_back(std::move(row));
    }

    Json per_template = Json::array();
    for (const auto& name : template_order) {
        Json entry = Json::object();
        entry["name"] = name;
        auto it = covered.find(name);
        std::size_t n = it == covered.end() ? 0 : it->second.size();
        entry["examples"] = n;
        const auto& body = templates.at(name).body;
        entry["templateLoc"] = loc_size(body);
        entry["templateAst"] = ast_size(body);
        if (n > 0) {
            entry["locRatio"] = concatenation_ratio(it->second, body, SizeMeasure::Loc);
            entry["astRatio"] = concatenation_ratio(it->second, body, SizeMeasure::Ast);
        } else {
            entry["locRatio"] = nullptr;
            entry["astRatio"] = nullptr;
        }
        per_template.push_back(std::move(entry));
    }

    std::size_t n_examples = manifest.at("examples").size();
    Json summary = Json::object();
    summary["examples"] = n_examples;
    summary["excluded"] = excluded;
    summary["templates"] = templates.size();
    summary["passed"] = passed;
    summary["failed"] = failed;
    summary["compressionRatio"] = templates.empty() ? Json(nullptr) : Json(compression_ratio(n_examples, excluded, templates.size()));

    Json report = Json::object();
    report["examples"] = std::move(rows);
    report["templates"] = std::move(per_template);
    report["summary"] = std::move(summary);
    if (manifest.contains("corpusCounts")) {
        const auto& cc = manifest.at("corpusCounts");
        auto ne = cc.at("examples").get<std::size_t>();
        auto nx = cc.at("excluded").get<std::size_t>();
        auto nt = cc.at("templates").get<std::size_t>();
        report["corpusCounts"] = {{"examples", ne}, {"excluded", nx}, {"templates", nt},
                                  {"compressionRatio", compression_ratio(ne, nx, nt)}};
    }
    return report;
}

std::string coverage_table(const Json& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %-24s %s\n", "example", "template", "status");
    out << line;
    for (const auto& row : report.at("examples")) {
        std::snprintf(line, sizeof line, "%-32s %-24s %s\n", row.at("id").get<std::string>().c_str(),
                      row.value("template", std::string("-")).c_str(), row.at("status").get<std::string>().c_str());
        out << line;
    }
    out << "\n";
    std::snprintf(line, sizeof line, "%-24s %8s %10s %10s\n", "template", "examples", "LOC ratio", "AST ratio");
    out << line;
    for (const auto& t : report.at("templates")) {
        auto ratio = [](const Json& v) { return v.is_null() ? std::string("-") : fmt(v.get<double>()); };
        std::snprintf(line, sizeof line, "%-24s %8zu %10s %10s\n", t.at("name").get<std::string>().c_str(),
                      t.at("examples").get<std::size_t>(), ratio(t.at("locRatio")).c_str(),
                      ratio(t.at("astRatio")).c_str());
        out << line;
    }
    const auto& s = report.at("summary");
    out << "\nexamples " << s.at("examples").get<std::size_t>() << ", excluded " << s.at("excluded").get<std::size_t>()
        << ", templates " << s.at("templates").get<std::size_t>() << ", passed " << s.at("passed").get<std::size_t>()
        << ", failed " << s.at("failed").get<std::size_t>();
    if (!s.at("compressionRatio").is_null()) out << ", compression " << fmt(s.at("compressionRatio").get<double>());
    out << "\n";
    if (report.contains("corpusCounts")) {
        const auto& c = report.at("corpusCounts");
        out << "corpus counts: examples " << c.at("examples").get<std::size_t>() << ", excluded "
            << c.at("excluded").get<std::size_t>() << ", templates " << c.at("templates").get<std::size_t>()
            << ", compression " << fmt(c.at("compressionRatio").get<double>()) << "\n";
    }
    return out.str();
}

}  // namespace ivy
