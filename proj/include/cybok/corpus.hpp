#pragma once

// Attack-vector corpus: CAPEC attack patterns, CWE weaknesses and CVE
// vulnerabilities normalized into one entry type, plus the on-disk snapshot
// store they are persisted in.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cybok {

enum class Database { CAPEC, CWE, CVE };

inline constexpr std::array<Database, 3> kAllDatabases = {Database::CAPEC, Database::CWE,
                                                          Database::CVE};

std::string_view to_string(Database db);
// Case-insensitive; throws InvalidArgument on anything else.
Database database_from_string(std::string_view name);

// "CAPEC-<digits>", "CWE-<digits>" or "CVE-<year>-<digits>".
bool is_well_formed_identifier(std::string_view id);
std::optional<Database> database_of(std::string_view id);

struct AttackVectorEntry {
    Database database = Database::CAPEC;
    std::string identifier;
    std::string name;
    std::string description;
    std::set<std::string> related_attack_patterns;
    std::set<std::string> related_weaknesses;
    std::set<std::string> related_vulnerabilities;

    bool operator==(const AttackVectorEntry&) const = default;
};

// Returns the list of violated invariants; empty means valid.
std::vector<std::string> check_invariants(const AttackVectorEntry& entry);

struct ParseResult {
    std::vector<AttackVectorEntry> entries;
    std::vector<std::string> warnings;
    // Catalog version attribute or feed timestamp, when the document has one.
    std::string version;
};

ParseResult parse_capec(std::string_view raw);
ParseResult parse_cwe(std::string_view raw);
// NVD CVE API 2.0 JSON ("vulnerabilities": [{"cve": {...}}]).
ParseResult parse_cve(std::string_view raw);
// Flat fixture format: <entries><entry db="" id=""><name/><description/><rel id=""/></entry></entries>
ParseResult parse_fixture(std::string_view raw);

// Picks the parser from the document shape; the fixture format is accepted
// for any database and its entries are filtered to `db`.
ParseResult parse_source(Database db, std::string_view raw);

struct CorpusSnapshot {
    std::map<std::string, AttackVectorEntry> entries;
    std::map<Database, std::string> source_versions;
    std::string ingested_at;

    const AttackVectorEntry* find(std::string_view id) const;
    std::size_t count(Database db) const;
    // Content hash of the entry files; stable across ingest times.
    std::string corpus_ref() const;
};

struct SnapshotBuild {
    CorpusSnapshot snapshot;
    std::vector<std::string> warnings;
};

// Last write wins on duplicate identifiers (with a warning). Throws
// InvalidArgument on an empty entry list.
SnapshotBuild build_snapshot(std::vector<AttackVectorEntry> entries,
                             std::map<Database, std::string> versions,
                             std::string ingested_at);

inline constexpr int kStoreFormatVersion = 1;

// Writes <dir>/manifest.json plus one <db>.jsonl per present database.
// Throws PersistenceError on I/O failure.
void save_snapshot(const CorpusSnapshot& snapshot, const std::filesystem::path& dir);
CorpusSnapshot load_snapshot(const std::filesystem::path& dir);

// Serialized entry file for one database, exactly as written to disk.
std::string serialize_entries(const CorpusSnapshot& snapshot, Database db);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Collapses whitespace runs to single spaces and trims.
std::string normalize_whitespace(std::string_view text);

}  // namespace cybok
