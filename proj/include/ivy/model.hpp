#pragma once

#include "ivy/expression.hpp"
#include "ivy/json.hpp"
#include "ivy/predicate.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ivy {

enum class DataRole { Measure, Dimension, Time };

std::string_view role_name(DataRole role);
std::optional<DataRole> parse_role(std::string_view text);

using RoleSet = std::set<DataRole>;

namespace param {

struct DataTarget {
    RoleSet allowed_roles;
    bool required = false;
    friend bool operator==(const DataTarget&, const DataTarget&) = default;
};

struct MultiDataTarget {
    RoleSet allowed_roles;
    bool required = false;
    std::optional<std::size_t> min_count;
    std::optional<std::size_t> max_count;
    friend bool operator==(const MultiDataTarget&, const MultiDataTarget&) = default;
};

struct String {
    friend bool operator==(const String&, const String&) = default;
};

struct Number {
    double min = 0;
    double max = 100;
    double step = 1;
    friend bool operator==(const Number&, const Number&) = default;
};

struct Boolean {
    friend bool operator==(const Boolean&, const Boolean&) = default;
};

struct Enum {
    std::vector<std::string> allowed_values;
    friend bool operator==(const Enum&, const Enum&) = default;
};

// Display-only entries in the settings pane; they never hold a value.
struct Text {
    std::string text;
    friend bool operator==(const Text&, const Text&) = default;
};

struct Section {
    std::string label;
    friend bool operator==(const Section&, const Section&) = default;
};

}  // namespace param

using ParamType = std::variant<param::DataTarget, param::MultiDataTarget, param::String, param::Number,
                               param::Boolean, param::Enum, param::Text, param::Section>;

std::string_view type_name(const ParamType& type);
bool is_data_param(const ParamType& type);

/// A settings value: an atomic JSON value, or a list of column names for a
/// MultiDataTarget.
class ArgumentValue {
public:
    ArgumentValue() : value_(Json(nullptr)) {}
    ArgumentValue(Json atomic);
    ArgumentValue(std::vector<std::string> list) : value_(std::move(list)) {}

    bool is_list() const noexcept { return std::holds_alternative<std::vector<std::string>>(value_); }
    bool is_null() const noexcept;
    const Json& atomic() const { return std::get<Json>(value_); }
    const std::vector<std::string>& list() const { return std::get<std::vector<std::string>>(value_); }

    Json to_json() const;

    friend bool operator==(const ArgumentValue& a, const ArgumentValue& b);

private:
    std::variant<Json, std::vector<std::string>> value_;
};

struct Parameter {
    std::string name;
    ParamType type;
    std::optional<Predicate> display_predicate;
    std::optional<ArgumentValue> default_value;

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct Symbol {
    std::string name;
    std::string description;
    friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct RangeFilter {
    double min = 0;
    double max = 0;
    friend bool operator==(const RangeFilter&, const RangeFilter&) = default;
};

struct OneOfFilter {
    std::vector<Json> values;
    friend bool operator==(const OneOfFilter&, const OneOfFilter&) = default;
};

struct Filter {
    std::string column;
    std::variant<RangeFilter, OneOfFilter> kind;
    friend bool operator==(const Filter&, const Filter&) = default;
};

/// Parameter name to argument, in insertion order, plus the reserved
/// `$filters` entry.
class Settings {
public:
    using Entry = std::pair<std::string, ArgumentValue>;

    const ArgumentValue* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    void set(std::string name, ArgumentValue value);
    void erase(std::string_view name);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty() && !filters; }

    std::optional<std::vector<Filter>> filters;

    /// Order-insensitive comparison of the bindings and filters.
    bool same_bindings(const Settings& other) const;

    friend bool operator==(const Settings&, const Settings&) = default;

private:
    std::vector<Entry> entries_;
};

struct Template {
    std::string name;
    std::string description;
    std::string language;
    std::vector<Parameter> params;
    Expression body;
    std::vector<Symbol> symbols;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::uint64_t version = 1;

    const Parameter* find_param(std::string_view param_name) const;
    const Symbol* find_symbol(std::string_view symbol_name) const;

    friend bool operator==(const Template&, const Template&) = default;
};

enum class MatchKind { Complete, Partial, NoMatch };

std::string_view match_name(MatchKind kind);

struct MatchResult {
    MatchKind kind = MatchKind::NoMatch;
    /// column name -> parameter name; injective per parameter slot.
    std::vector<std::pair<std::string, std::string>> mapping;
    /// Required data parameters left uncovered by `mapping`.
    std::size_t uncovered_required = 0;
};

enum class DiagnosticKind { UndeclaredVariable, UnusedParameter, DuplicateName, InvalidParamConfig, InvalidDefault };

std::string_view diagnostic_name(DiagnosticKind kind);

struct Diagnostic {
    DiagnosticKind kind;
    std::string name;
    std::string message;
    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct Violation {
    std::string parameter;
    std::string reason;
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Well-formedness diagnostics; empty iff the template is well formed.
std::vector<Diagnostic> lint_template(const Template& t);

/// Type compatibility of one argument. Null means "unset" and is accepted
/// for every value-bearing parameter.
std::optional<Violation> validate_argument(const Parameter& p, const ArgumentValue& v);

/// Every key names a declared parameter and every value validates.
std::vector<Violation> validate_settings(const Template& t, const Settings& s);

/// Settings with every unset parameter that has a default filled in.
Settings with_defaults(const Template& t, const Settings& s);

bool is_identifier(std::string_view text);

}  // namespace ivy
