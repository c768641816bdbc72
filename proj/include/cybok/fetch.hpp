#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cybok/corpus.hpp"

namespace cybok {

// One source per enabled database: an http(s)/file URL or a local path.
struct CorpusConfig {
    std::map<Database, std::string> sources;

    // Looks for capec.xml, cwe.xml and cve.json (or cve.xml) in `dir`.
    static CorpusConfig from_offline_dir(const std::filesystem::path& dir);
    // {"capec": "...", "cwe": "...", "cve": "..."}
    static CorpusConfig from_json(std::string_view text);

    // Keeps only the listed databases.
    CorpusConfig restricted_to(const std::vector<Database>& dbs) const;
};

struct FetchedSource {
    Database database = Database::CAPEC;
    std::string origin;
    std::filesystem::path stored_path;
    std::string version;
    std::size_t bytes = 0;
    bool from_network = false;
};

struct FetchReport {
    std::vector<FetchedSource> sources;
};

inline constexpr const char* kSourcesManifest = "sources.json";

// Copies or downloads every configured source into `destination` and writes
// sources.json describing them. Local paths never touch the network.
// Throws FetchError (retryable) on transport failure and CorruptSourceError on
// an empty or unparseable payload.
FetchReport fetch_sources(const CorpusConfig& config, const std::filesystem::path& destination);

// Reads back the sources.json written by fetch_sources.
FetchReport load_fetch_report(const std::filesystem::path& destination);

}  // namespace cybok
