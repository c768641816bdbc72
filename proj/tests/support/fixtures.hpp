#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "cybok/corpus.hpp"
#include "cybok/index.hpp"
#include "cybok/model.hpp"

namespace fixtures {

inline std::filesystem::path root() { return CYBOK_FIXTURES; }
inline std::filesystem::path corpus_dir() { return root() / "corpus"; }
inline std::filesystem::path uas_model_path() { return root() / "models" / "uas.graphml"; }
inline std::filesystem::path test_data(const std::string& name) { return std::filesystem::path(CYBOK_TEST_DATA) / name; }

inline cybok::SystemModel uas_model() { return cybok::load_graphml(cybok::read_file(uas_model_path())); }

// The bundled CAPEC/CWE/CVE fixture corpus, parsed and snapshotted in memory.
inline const cybok::CorpusSnapshot& corpus() {
    static const cybok::CorpusSnapshot snapshot = [] {
        std::vector<cybok::AttackVectorEntry> entries;
        std::map<cybok::Database, std::string> versions;
        const std::pair<cybok::Database, const char*> files[] = {
            {cybok::Database::CAPEC, "capec.xml"}, {cybok::Database::CWE, "cwe.xml"}, {cybok::Database::CVE, "cve.json"}};
        for (const auto& [db, file] : files) {
            auto parsed = cybok::parse_source(db, cybok::read_file(corpus_dir() / file));
            versions[db] = parsed.version;
            entries.insert(entries.end(), parsed.entries.begin(), parsed.entries.end());
        }
        return cybok::build_snapshot(std::move(entries), std::move(versions), "2018-08-01T00:00:00Z").snapshot;
    }();
    return snapshot;
}

inline const cybok::SearchIndex& corpus_index() {
    static const cybok::SearchIndex index = cybok::build_index(corpus());
    return index;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("cybok-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
