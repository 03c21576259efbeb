#include "ivy/explore.hpp"

#include "ivy/error.hpp"
#include "ivy/evaluator.hpp"
#include "ivy/parser.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace ivy {

namespace {

struct Slot {
    std::size_t param;  // index into the template's params
    bool required;
};

const RoleSet* allowed_roles(const ParamType& type) {
    if (const auto* d = std::get_if<param::DataTarget>(&type)) return &d->allowed_roles;
    if (const auto* m = std::get_if<param::MultiDataTarget>(&type)) return &m->allowed_roles;
    return nullptr;
}

std::vector<Slot> build_slots(const Template& t, std::size_t query_size) {
    std::vector<Slot> slots;
    for (std::size_t j = 0; j < t.params.size(); ++j) {
        const auto& type = t.params[j].type;
        std::size_t cap = 0, need = 0;
        if (const auto* d = std::get_if<param::DataTarget>(&type)) {
            cap = 1;
            need = d->required ? 1 : 0;
        } else if (const auto* m = std::get_if<param::MultiDataTarget>(&type)) {
            cap = m->max_count.value_or(query_size);
            need = m->required ? std::max<std::size_t>(1, m->min_count.value_or(1)) : 0;
        } else {
            continue;
        }
        // Required slots beyond what the query could fill still count as required.
        std::size_t total = std::max(cap, need);
        for (std::size_t k = 0; k < total; ++k) slots.push_back({j, k < need});
    }
    return slots;
}

class Matcher {
public:
    Matcher(const Template& t, const std::vector<ColumnQuery>& query)
        : slots_(build_slots(t, query.size())), slot_col_(slots_.size(), -1), col_slot_(query.size(), -1) {
        adj_.resize(query.size());
        slot_adj_.resize(slots_.size());
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            const auto* roles = allowed_roles(t.params[slots_[s].param].type);
            for (std::size_t c = 0; c < query.size(); ++c) {
                if (roles->count(query[c].role)) {
                    adj_[c].push_back(s);
                    slot_adj_[s].push_back(c);
                }
            }
        }
    }

    void run() {
        // Cover as many required slots as possible first; augmenting paths
        // never unmatch a vertex, so that coverage survives the second pass.
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            if (!slots_[s].required) continue;
            std::vector<char> seen(col_slot_.size(), 0);
            augment_from_slot(s, seen);
        }
        for (std::size_t c = 0; c < col_slot_.size(); ++c) {
            if (col_slot_[c] >= 0) continue;
            std::vector<char> seen(slots_.size(), 0);
            augment_from_column(c, seen);
        }
    }

    const std::vector<Slot>& slots() const { return slots_; }
    const std::vector<int>& slot_col() const { return slot_col_; }
    const std::vector<int>& col_slot() const { return col_slot_; }

private:
    bool augment_from_slot(std::size_t s, std::vector<char>& seen) {
        for (std::size_t c : slot_adj_[s]) {
            if (seen[c]) continue;
            seen[c] = 1;
            if (col_slot_[c] < 0 || augment_from_slot(static_cast<std::size_t>(col_slot_[c]), seen)) {
                col_slot_[c] = static_cast<int>(s);
                slot_col_[s] = static_cast<int>(c);
                return true;
            }
        }
        return false;
    }

    bool augment_from_column(std::size_t c, std::vector<char>& seen) {
        for (std::size_t s : adj_[c]) {
            if (seen[s]) continue;
            seen[s] = 1;
            if (slot_col_[s] < 0 || augment_from_column(static_cast<std::size_t>(slot_col_[s]), seen)) {
                slot_col_[s] = static_cast<int>(c);
                col_slot_[c] = static_cast<int>(s);
                return true;
            }
        }
        return false;
    }

    std::vector<Slot> slots_;
    std::vector<int> slot_col_;
    std::vector<int> col_slot_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::vector<std::size_t>> slot_adj_;
};

bool has_room(const ParamType& type, const ArgumentValue* current) {
    if (std::holds_alternative<param::DataTarget>(type)) return !current || current->is_null();
    const auto& m = std::get<param::MultiDataTarget>(type);
    std::size_t used = 0;
    if (current && !current->is_null()) used = current->is_list() ? current->list().size() : 1;
    return !m.max_count || used < *m.max_count;
}

}  // namespace

MatchResult match_template(const Template& t, const std::vector<ColumnQuery>& query) {
    Matcher m(t, query);
    m.run();
    MatchResult result;
    const auto& col_slot = m.col_slot();
    if (std::any_of(col_slot.begin(), col_slot.end(), [](int s) { return s < 0; })) return result;

    for (std::size_t c = 0; c < query.size(); ++c) {
        result.mapping.emplace_back(query[c].name, t.params[m.slots()[col_slot[c]].param].name);
    }
    std::vector<std::size_t> short_params;
    for (std::size_t s = 0; s < m.slots().size(); ++s) {
        if (m.slots()[s].required && m.slot_col()[s] < 0) {
            std::size_t p = m.slots()[s].param;
            if (std::find(short_params.begin(), short_params.end(), p) == short_params.end()) short_params.push_back(p);
        }
    }
    result.uncovered_required = short_params.size();
    result.kind = short_params.empty() ? MatchKind::Complete : MatchKind::Partial;
    return result;
}

std::vector<CatalogHit> search_catalog(const std::vector<Template>& templates, const std::vector<ColumnQuery>& query) {
    std::vector<CatalogHit> hits;
    for (const auto& t : templates) {
        auto m = match_template(t, query);
        if (m.kind != MatchKind::NoMatch) hits.push_back({&t, std::move(m)});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const CatalogHit& a, const CatalogHit& b) {
        if (a.match.kind != b.match.kind) return a.match.kind == MatchKind::Complete;
        if (a.match.uncovered_required != b.match.uncovered_required) {
            return a.match.uncovered_required < b.match.uncovered_required;
        }
        return a.tpl->name < b.tpl->name;
    });
    return hits;
}

Settings add_to_shelf(const Template& t, const ColumnQuery& column, const Settings& s) {
    for (const auto& p : t.params) {
        const auto* roles = allowed_roles(p.type);
        if (!roles || !roles->count(column.role)) continue;
        const auto* current = s.find(p.name);
        if (!has_room(p.type, current)) continue;

        Settings out = s;
        if (std::holds_alternative<param::DataTarget>(p.type)) {
            out.set(p.name, ArgumentValue(Json(column.name)));
        } else {
            std::vector<std::string> list;
            if (current && current->is_list()) {
                list = current->list();
            } else if (current && current->atomic().is_string()) {
                list.push_back(current->atomic().get<std::string>());
            }
            list.push_back(column.name);
            out.set(p.name, ArgumentValue(std::move(list)));
        }
        return out;
    }
    return s;
}

std::vector<std::string> bound_columns(const Template& t, const Settings& s) {
    std::vector<std::string> out;
    for (const auto& p : t.params) {
        if (!is_data_param(p.type)) continue;
        const auto* v = s.find(p.name);
        if (!v || v->is_null()) continue;
        if (v->is_list()) {
            out.insert(out.end(), v->list().begin(), v->list().end());
        } else if (v->atomic().is_string()) {
            out.push_back(v->atomic().get<std::string>());
        }
    }
    return out;
}

Translation translate_settings(const Template& from, const Template& to, const Settings& s,
                               const std::function<std::optional<DataRole>(const std::string&)>& role_of) {
    Translation out;
    out.settings.filters = s.filters;
    std::vector<ColumnQuery> placed;
    auto columns = bound_columns(from, s);
    for (const auto& name : columns) {
        auto role = role_of(name);
        if (!role) {
            out.dropped.push_back(name);
            continue;
        }
        Settings next = add_to_shelf(to, {name, *role}, out.settings);
        if (next == out.settings) {
            out.dropped.push_back(name);
            continue;
        }
        out.settings = std::move(next);
        placed.push_back({name, *role});
    }
    if (!columns.empty() && placed.empty()) {
        throw Error(ErrorCode::NoMatch, "no bound column fits template '" + to.name + "'", {{"dropped", out.dropped}});
    }
    out.kind = out.dropped.empty() ? match_template(to, placed).kind : MatchKind::Partial;
    return out;
}

void check_fan_out(const Template& t, const FanOutRequest& req) {
    std::vector<Violation> violations;
    for (const auto& [name, options] : req.option_sets) {
        const auto* p = t.find_param(name);
        if (!p || std::holds_alternative<param::Text>(p->type) || std::holds_alternative<param::Section>(p->type)) {
            throw Error(ErrorCode::BadSettingsShape, "cannot fan out over '" + name + "': no such value parameter",
                        {{"parameter", name}});
        }
        if (options.empty()) {
            throw Error(ErrorCode::BadSettingsShape, "option set for '" + name + "' is empty", {{"parameter", name}});
        }
        for (const auto& v : options) {
            if (auto bad = validate_argument(*p, v)) violations.push_back(*bad);
        }
    }
    if (!violations.empty()) {
        Json detail = Json::array();
        for (const auto& v : violations) detail.push_back({{"parameter", v.parameter}, {"reason", v.reason}});
        throw Error(ErrorCode::SettingsViolation, "fan-out options do not match the template parameters",
                    {{"violations", detail}});
    }
}

std::vector<FanOutCell> fan_out(const Template& t, const FanOutRequest& req, const Dataset* d,
                                const LanguageRegistry& languages, FanOutOptions options) {
    check_fan_out(t, req);

    auto sets = req.option_sets;
    auto decl_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < t.params.size(); ++i) {
            if (t.params[i].name == name) return i;
        }
        return t.params.size();
    };
    std::stable_sort(sets.begin(), sets.end(),
                     [&](const auto& a, const auto& b) { return decl_index(a.first) < decl_index(b.first); });

    std::size_t total = 1;
    for (const auto& [name, opts] : sets) total *= opts.size();

    std::vector<FanOutCell> cells(total);
    for (std::size_t i = 0; i < total; ++i) {
        Settings s = req.base;
        std::size_t rest = i;
        // Mixed-radix digits; the last declared set varies fastest.
        std::vector<std::size_t> digits(sets.size());
        for (std::size_t k = sets.size(); k-- > 0;) {
            digits[k] = rest % sets[k].second.size();
            rest /= sets[k].second.size();
        }
        for (std::size_t k = 0; k < sets.size(); ++k) s.set(sets[k].first, sets[k].second[digits[k]]);
        cells[i].settings = std::move(s);
    }

    auto run_cell = [&](FanOutCell& cell) {
        try {
            cell.spec = apply_template(t, cell.settings, d, languages, ApplyOptions{options.validate});
        } catch (const Error& e) {
            cell.error = e.to_json();
        } catch (const std::exception& e) {
            cell.error = Json{{"error", "Internal"}, {"message", e.what()}, {"detail", nullptr}};
        }
    };

    unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));
    if (jobs <= 1) {
        for (auto& cell : cells) run_cell(cell);
        return cells;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) run_cell(cells[i]);
        });
    }
    for (auto& w : workers) w.join();
    return cells;
}

std::string fan_out_file_name(std::size_t index, const Settings& s) {
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "%04zu", index);
    return std::string(prefix) + "-" + sha256_hex(serialize_settings(s)).substr(0, 12) + ".json";
}

Json fan_out_to_json(const std::vector<FanOutCell>& cells) {
    Json out = Json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Json cell = Json::object();
        cell["index"] = i;
        cell["settings"] = settings_to_json(cells[i].settings);
        if (cells[i].spec) {
            cell["spec"] = *cells[i].spec;
        } else {
            cell["error"] = cells[i].error.value_or(Json(nullptr));
        }
        out.push_back(std::move(cell));
    }
    return out;
}

}  // namespace ivy
