#pragma once

// Local analysis service: in-memory what-if sessions over a shared, read-only
// corpus and index, exposed over HTTP under /api/v1.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "cybok/report.hpp"

namespace cybok {

class AnalysisService {
public:
    // Throws StaleIndexError when the index does not belong to the snapshot.
    AnalysisService(std::shared_ptr<const CorpusSnapshot> snapshot, std::shared_ptr<const SearchIndex> index);
    ~AnalysisService();

    AnalysisService(const AnalysisService&) = delete;
    AnalysisService& operator=(const AnalysisService&) = delete;

    // Parses and validates GraphML; throws ParseError / ValidationError.
    std::string create_session(std::string_view graphml);

    struct ModelView {
        SystemModel model;
        std::uint64_t revision = 0;
    };
    ModelView model(const std::string& session_id) const;
    nlohmann::json model_json(const std::string& session_id) const;

    // Replaces one category's keywords; every call bumps the revision, even
    // when the list is unchanged. Throws NotFoundError / InvalidArgument.
    std::uint64_t edit_descriptor(const std::string& session_id, std::string_view element, std::string_view category,
                                  const std::vector<std::string>& keywords);

    // Report document, byte-identical to `cybok analyze` on the same model.
    std::string analyze(const std::string& session_id, const AnalysisOptions& options = {});
    nlohmann::json surface(const std::string& session_id);
    nlohmann::json chains(const std::string& session_id, const std::string& target,
                          std::size_t max_len = kDefaultMaxPathLength);
    std::string export_graphml(const std::string& session_id) const;
    nlohmann::json corpus_entry(std::string_view identifier) const;

    std::size_t session_count() const;
    // Number of analyses computed rather than served from cache.
    std::uint64_t analyses_computed() const;

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& session_id) const;
    // Evidence, surface and rollup for the current revision, computed at most once.
    std::shared_ptr<const AnalysisResult> base_result(Session& session, SystemModel& model_out);

    std::shared_ptr<const CorpusSnapshot> snapshot_;
    std::shared_ptr<const SearchIndex> index_;

    mutable std::shared_mutex sessions_mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;

    std::mutex rng_mu_;
    std::uint64_t rng_state_;
    std::atomic<std::uint64_t> computed_{0};
};

// HTTP front end for AnalysisService.
class HttpServer {
public:
    explicit HttpServer(AnalysisService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds; port 0 picks a free port. Returns the bound port. Throws Error on failure.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace cybok
