#pragma once

#include "ivy/json.hpp"
#include "ivy/model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ivy {

struct Column {
    std::string name;
    DataRole role = DataRole::Dimension;
    bool role_overridden = false;
    friend bool operator==(const Column&, const Column&) = default;
};

/// A single flat table. Every row is a JSON object carrying every column, in
/// column order, with null for missing cells.
struct Dataset {
    std::vector<Column> columns;
    std::vector<Json> rows;

    const Column* find_column(std::string_view name) const;
    /// Overrides the inferred role of one column. Throws UnknownColumn.
    void set_role(std::string_view name, DataRole role);
};

enum class DataFormat { Csv, JsonArray };

/// Parses CSV (RFC 4180, header row required) or a JSON array of flat
/// objects. `max_bytes` of zero disables the size limit.
Dataset load_dataset(std::string_view bytes, DataFormat format, std::size_t max_bytes = 0);

/// Measure when every value is numeric; Time when at least 90% of the values
/// read as ISO-8601 dates/datetimes or 4-digit years; Dimension otherwise.
/// Nulls are ignored; an all-null column is a Dimension.
DataRole infer_role(const std::vector<Json>& values);

/// Conjunction of the filters. Rows with null in a filtered column are dropped.
Dataset apply_filters(const Dataset& d, const std::vector<Filter>& filters);

/// (name, role) pairs in column order, as used by catalog search.
std::vector<std::pair<std::string, DataRole>> column_roles(const Dataset& d);

}  // namespace ivy
