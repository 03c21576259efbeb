#include "ivy/data.hpp"

#include "ivy/error.hpp"
#include "ivy/predicate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <regex>

namespace ivy {

namespace {

constexpr double kTimeShare = 0.9;

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // A blank line contributes a single empty field; skip it.
        if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
        record.clear();
    };

    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) {
                    throw Error(ErrorCode::RaggedCsv, "stray quote on line " + std::to_string(line), {{"line", line}});
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                end_record();
                ++line;
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::RaggedCsv, "unterminated quoted field");
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

std::optional<Json> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::int64_t iv = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), iv);
    if (ec == std::errc() && ptr == text.data() + text.size()) return Json(iv);
    char* end = nullptr;
    double d = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(d)) return std::nullopt;
    // strtod accepts forms JSON does not ("inf", hex, leading '+'); keep those as text.
    for (char c : text) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == 'e' || c == 'E' || c == '+')) {
            return std::nullopt;
        }
    }
    return Json(d);
}

bool looks_temporal(const std::string& text) {
    static const std::regex pattern(
        R"(^\d{4}(-(0[1-9]|1[0-2])(-(0[1-9]|[12]\d|3[01])([T ]([01]\d|2[0-3]):[0-5]\d(:([0-5]\d|60)(\.\d+)?)?)"
        R"((Z|[+-]\d{2}:?\d{2})?)?)?)?$)");
    return std::regex_match(text, pattern);
}

Dataset finish(std::vector<std::string> names, std::vector<std::vector<Json>> cells) {
    Dataset d;
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::vector<Json> column;
        column.reserve(cells.size());
        for (const auto& row : cells) column.push_back(row[c]);
        d.columns.push_back({names[c], infer_role(column), false});
    }
    d.rows.reserve(cells.size());
    for (auto& row : cells) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < names.size(); ++c) obj[names[c]] = std::move(row[c]);
        d.rows.push_back(std::move(obj));
    }
    return d;
}

Dataset load_csv(std::string_view bytes) {
    auto records = split_csv(bytes);
    if (records.empty()) throw Error(ErrorCode::EmptyDataset, "CSV has no header row");
    std::vector<std::string> names = records.front();
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (names[i] == names[j]) throw Error(ErrorCode::RaggedCsv, "duplicate column name '" + names[i] + "'");
        }
    }
    if (records.size() == 1) throw Error(ErrorCode::EmptyDataset, "CSV has no data rows");

    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != names.size()) {
            throw Error(ErrorCode::RaggedCsv,
                        "record " + std::to_string(r) + " has " + std::to_string(records[r].size()) + " fields, expected " +
                            std::to_string(names.size()),
                        {{"record", r}});
        }
    }

    std::vector<std::vector<Json>> cells(records.size() - 1, std::vector<Json>(names.size()));
    for (std::size_t c = 0; c < names.size(); ++c) {
        bool numeric = true;
        for (std::size_t r = 1; r < records.size() && numeric; ++r) {
            const auto& text = records[r][c];
            if (!text.empty() && !parse_number(text)) numeric = false;
        }
        for (std::size_t r = 1; r < records.size(); ++r) {
            const auto& text = records[r][c];
            if (text.empty()) {
                cells[r - 1][c] = nullptr;
            } else if (numeric) {
                cells[r - 1][c] = *parse_number(text);
            } else {
                cells[r - 1][c] = text;
            }
        }
    }
    return finish(std::move(names), std::move(cells));
}

Dataset load_json_rows(std::string_view bytes) {
    Json doc = parse_json(bytes);
    if (!doc.is_array()) throw Error(ErrorCode::NonFlatJson, "JSON dataset must be an array of objects");
    if (doc.empty()) throw Error(ErrorCode::EmptyDataset, "JSON dataset has no rows");
    std::vector<std::string> names;
    for (const auto& row : doc) {
        if (!row.is_object()) throw Error(ErrorCode::NonFlatJson, "JSON dataset rows must be objects");
        for (const auto& [key, value] : row.items()) {
            if (!is_atomic(value)) {
                throw Error(ErrorCode::NonFlatJson, "column '" + key + "' holds a nested value", {{"column", key}});
            }
            if (std::find(names.begin(), names.end(), key) == names.end()) names.push_back(key);
        }
    }
    std::vector<std::vector<Json>> cells;
    cells.reserve(doc.size());
    for (const auto& row : doc) {
        std::vector<Json> out(names.size());
        for (std::size_t c = 0; c < names.size(); ++c) {
            auto it = row.find(names[c]);
            out[c] = it == row.end() ? Json(nullptr) : *it;
        }
        cells.push_back(std::move(out));
    }
    return finish(std::move(names), std::move(cells));
}

std::optional<double> numeric_value(const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        if (auto n = parse_number(v.get<std::string>())) return n->get<double>();
    }
    return std::nullopt;
}

}  // namespace

const Column* Dataset::find_column(std::string_view name) const {
    for (const auto& c : columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void Dataset::set_role(std::string_view name, DataRole role) {
    for (auto& c : columns) {
        if (c.name == name) {
            c.role = role;
            c.role_overridden = true;
            return;
        }
    }
    throw Error(ErrorCode::UnknownColumn, "no column named '" + std::string(name) + "'", {{"column", std::string(name)}});
}

Dataset load_dataset(std::string_view bytes, DataFormat format, std::size_t max_bytes) {
    if (max_bytes != 0 && bytes.size() > max_bytes) {
        throw Error(ErrorCode::DatasetTooLarge,
                    "dataset of " + std::to_string(bytes.size()) + " bytes exceeds the limit of " + std::to_string(max_bytes));
    }
    return format == DataFormat::Csv ? load_csv(bytes) : load_json_rows(bytes);
}

DataRole infer_role(const std::vector<Json>& values) {
    std::size_t present = 0, numeric = 0, temporal = 0;
    for (const auto& v : values) {
        if (v.is_null()) continue;
        ++present;
        if (v.is_number()) {
            ++numeric;
        } else if (v.is_string() && looks_temporal(v.get_ref<const std::string&>())) {
            ++temporal;
        }
    }
    if (present == 0) return DataRole::Dimension;
    if (numeric == present) return DataRole::Measure;
    if (static_cast<double>(temporal) >= kTimeShare * static_cast<double>(present)) return DataRole::Time;
    return DataRole::Dimension;
}

Dataset apply_filters(const Dataset& d, const std::vector<Filter>& filters) {
    for (const auto& f : filters) {
        if (!d.find_column(f.column)) {
            throw Error(ErrorCode::UnknownColumn, "filter references unknown column '" + f.column + "'", {{"column", f.column}});
        }
    }
    if (filters.empty()) return d;

    Dataset out;
    out.columns = d.columns;
    for (const auto& row : d.rows) {
        bool keep = true;
        for (const auto& f : filters) {
            const Json& v = row.at(f.column);
            if (v.is_null()) {
                keep = false;
            } else if (const auto* r = std::get_if<RangeFilter>(&f.kind)) {
                auto x = numeric_value(v);
                keep = x && *x >= r->min && *x <= r->max;
            } else {
                const auto& opts = std::get<OneOfFilter>(f.kind).values;
                keep = std::any_of(opts.begin(), opts.end(), [&](const Json& o) { return predicate_equal(v, o); });
            }
            if (!keep) break;
        }
        if (keep) out.rows.push_back(row);
    }
    return out;
}

std::vector<std::pair<std::string, DataRole>> column_roles(const Dataset& d) {
    std::vector<std::pair<std::string, DataRole>> out;
    out.reserve(d.columns.size());
    for (const auto& c : d.columns) out.emplace_back(c.name, c.role);
    return out;
}

}  // namespace ivy
