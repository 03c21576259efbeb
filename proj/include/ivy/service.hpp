#pragma once

#include "ivy/error.hpp"
#include "ivy/languages.hpp"
#include "ivy/store.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace ivy {

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    /// Empty keeps the store in memory.
    std::filesystem::path store_dir;
    std::size_t max_dataset_bytes = 64u << 20;
    /// Fan-out workers per request; 0 means one per hardware thread.
    unsigned fanout_jobs = 0;
};

/// Reads a JSON config file (`bind`, `port`, `storeDir`, `maxDatasetBytes`,
/// `fanoutJobs`; all optional) then applies IVY_BIND, IVY_PORT and
/// IVY_STORE_DIR. An empty path skips the file. Relative `storeDir` resolves
/// against the config file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path);

/// HTTP status for an engine error.
int http_status(ErrorCode code);

/// HTTP/1.1 JSON API over a template store and the engine.
class Service {
public:
    Service(ServiceConfig config, const LanguageRegistry& languages);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the configured address and serves until stop(). False when the
    /// socket cannot be bound.
    bool listen();
    /// Binds an ephemeral port on the configured address and returns it.
    int bind_ephemeral();
    /// Serves on a socket bound by bind_ephemeral() until stop().
    bool listen_after_bind();
    void stop();
    /// Blocks until the server accepts connections.
    void wait_until_ready() const;

    TemplateStore& store();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ivy
