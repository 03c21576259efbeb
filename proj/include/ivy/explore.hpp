#pragma once

#include "ivy/data.hpp"
#include "ivy/languages.hpp"
#include "ivy/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ivy {

struct ColumnQuery {
    std::string name;
    DataRole role;
};

/// Data-parameter slots: a DataTarget holds one column, a MultiDataTarget up
/// to maxCount. A required DataTarget needs its column; a required
/// MultiDataTarget needs max(1, minCount) columns.
///
/// Partial when every query column maps injectively onto a role-compatible
/// slot; Complete when one such map also fills every required slot. Decided by
/// maximum bipartite matching, so the answer is exact.
MatchResult match_template(const Template& t, const std::vector<ColumnQuery>& query);

struct CatalogHit {
    const Template* tpl;
    MatchResult match;
};

/// Complete before Partial, then fewer uncovered required parameters, then
/// name. NoMatch templates are left out.
std::vector<CatalogHit> search_catalog(const std::vector<Template>& templates, const std::vector<ColumnQuery>& query);

/// Binds `column` to the first data parameter (declaration order) that accepts
/// its role and still has room. Returns `s` unchanged when nothing fits.
Settings add_to_shelf(const Template& t, const ColumnQuery& column, const Settings& s);

struct Translation {
    Settings settings;
    MatchKind kind = MatchKind::Complete;
    std::vector<std::string> dropped;
};

/// Moves the column bindings of `s` onto `to` by repeated add_to_shelf in
/// `from` declaration order. Non-data parameters are left unset so `to`
/// defaults apply; filters carry over. Columns `role_of` cannot classify, or
/// that find no slot, are dropped and the result is Partial. Throws NoMatch
/// when there were columns and none could be placed.
Translation translate_settings(const Template& from, const Template& to, const Settings& s,
                               const std::function<std::optional<DataRole>(const std::string&)>& role_of);

/// Column names bound in `s`, in parameter declaration order.
std::vector<std::string> bound_columns(const Template& t, const Settings& s);

struct FanOutRequest {
    std::string template_name;
    Settings base;
    std::vector<std::pair<std::string, std::vector<ArgumentValue>>> option_sets;
};

struct FanOutCell {
    Settings settings;
    std::optional<Json> spec;
    /// Error::to_json() of a failed cell.
    std::optional<Json> error;
};

struct FanOutOptions {
    /// 0 means one worker per hardware thread.
    unsigned jobs = 0;
    bool validate = true;
};

/// Throws BadSettingsShape for unknown parameters or empty option sets and
/// SettingsViolation for options the parameter rejects.
void check_fan_out(const Template& t, const FanOutRequest& req);

/// One cell per combination, ordered lexicographically with the first
/// declared parameter varying slowest. Cell failures are recorded, not thrown.
std::vector<FanOutCell> fan_out(const Template& t, const FanOutRequest& req, const Dataset* d,
                                const LanguageRegistry& languages, FanOutOptions options = {});

/// `<index>-<digest>.json`, the digest taken over the canonical settings text.
std::string fan_out_file_name(std::size_t index, const Settings& s);

Json fan_out_to_json(const std::vector<FanOutCell>& cells);

}  // namespace ivy
