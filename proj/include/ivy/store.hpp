#pragma once

#include "ivy/model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ivy {

struct StoredTemplate {
    Template tpl;
    std::string owner;
    std::string created_at;
    /// Source (name, version) for forks.
    std::optional<std::pair<std::string, std::uint64_t>> fork_of;
};

Json stored_info_to_json(const StoredTemplate& st);

/// Versioned template store. Every version is one canonical document on disk,
/// written to a temporary file and renamed into place before an entry is
/// appended to `log.jsonl`; startup replays the log. Readers share a lock
/// and only ever see fully written versions; writers are serialized.
class TemplateStore {
public:
    /// An empty `dir` keeps everything in memory.
    explicit TemplateStore(std::filesystem::path dir = {});

    /// Stores `t` as version latest+1. `expected_version` is the caller's
    /// idea of the latest version (0: the name must be new); a mismatch
    /// throws VersionConflict. Throws BadTemplateShape for unusable names.
    StoredTemplate publish(Template t, std::optional<std::uint64_t> expected_version = std::nullopt,
                           std::string owner = {});

    /// Copies the latest version of `source` to a new name at version 1.
    /// Throws NotFound, or VersionConflict when `new_name` exists.
    StoredTemplate fork(std::string_view source, std::string new_name, std::string owner = {});

    std::optional<StoredTemplate> latest(std::string_view name) const;
    std::optional<StoredTemplate> get(std::string_view name, std::uint64_t version) const;
    /// Latest version of every template, by name.
    std::vector<StoredTemplate> list() const;
    std::vector<Template> catalog() const;

private:
    using Versions = std::vector<std::shared_ptr<const StoredTemplate>>;

    StoredTemplate commit(StoredTemplate st);
    void replay();

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::mutex write_mutex_;
    std::map<std::string, Versions, std::less<>> versions_;
};

}  // namespace ivy
