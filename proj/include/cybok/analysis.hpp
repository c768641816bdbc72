#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cybok/corpus.hpp"
#include "cybok/index.hpp"
#include "cybok/model.hpp"

namespace cybok {

// One association of a model element's descriptor keyword to an attack
// vector. Ordered by (element, category, keyword, attack_vector).
struct EvidenceRecord {
    ElementRef element;
    Category category = Category::OperatingSystem;
    std::string keyword;
    std::string attack_vector;

    auto operator<=>(const EvidenceRecord&) const = default;
};

// Every (element, category, keyword, av) with av in index.query(keyword), over
// all descriptors of the model. Sorted, duplicates removed.
std::vector<EvidenceRecord> associate(const SystemModel& model, const SearchIndex& index);

// Throws StaleIndexError when the index was not built from this snapshot.
void require_matching_index(const SearchIndex& index, const CorpusSnapshot& snapshot);

struct SurfaceTrigger {
    std::string keyword;
    std::string attack_vector;

    auto operator<=>(const SurfaceTrigger&) const = default;
};

struct AttackSurfaceElement {
    std::string asset;
    std::vector<SurfaceTrigger> triggering_keywords;  // sorted, non-empty

    bool operator==(const AttackSurfaceElement&) const = default;
};

// Assets holding at least one entry_points evidence record, by asset id.
std::vector<AttackSurfaceElement> attack_surface(const SystemModel& model,
                                                 const std::vector<EvidenceRecord>& evidence);

// vertices.size() == edges.size() + 1; edges[i] joins vertices[i] and vertices[i+1].
struct Path {
    std::vector<std::string> vertices;
    std::vector<std::string> edges;

    std::size_t length() const { return edges.size(); }
    auto operator<=>(const Path&) const = default;
};

struct PathSet {
    std::vector<Path> paths;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultMaxPathLength = 8;
inline constexpr std::size_t kMaxPathsPerPair = 10000;

// All vertex-simple paths source -> target with at most max_len edges. Directed
// edges are followed source-to-target only, undirected ones both ways; parallel
// edges yield distinct paths. Ordered by length, then vertex ids, then edge ids.
// Stops after `limit` paths and sets `truncated`.
PathSet enumerate_simple_paths(const SystemModel& model, const std::string& source, const std::string& target,
                               std::size_t max_len, std::size_t limit = kMaxPathsPerPair);

struct ExploitChain {
    std::string source;
    std::string target;
    Path path;
    bool trivial = false;  // source == target, no lateral movement
    std::map<ElementRef, std::vector<EvidenceRecord>> evidence;

    bool operator==(const ExploitChain&) const = default;
};

struct ChainSet {
    std::vector<ExploitChain> chains;
    bool truncated = false;
};

// Admissible simple paths from every surface asset to `target`: every vertex
// and every edge on the path carries at least one evidence record.
ChainSet exploit_chains(const SystemModel& model, const std::vector<EvidenceRecord>& evidence,
                        const std::vector<AttackSurfaceElement>& surface, const std::string& target,
                        std::size_t max_len = kDefaultMaxPathLength);

struct ElementRollup {
    std::set<std::string> cves;
    std::set<std::string> derived_cwes;
    std::set<std::string> derived_capecs;
    std::set<std::string> direct_cwes;
    std::set<std::string> direct_capecs;

    bool operator==(const ElementRollup&) const = default;
};

struct AbstractionRollup {
    std::map<ElementRef, ElementRollup> per_element;
    std::vector<std::string> warnings;

    bool operator==(const AbstractionRollup&) const = default;
};

// One hop per relationship: matched CVEs -> their CWEs (derived_cwes); matched
// CVEs, matched CWEs and derived CWEs -> their CAPECs (derived_capecs). Only
// identifiers present in the snapshot are kept.
AbstractionRollup rollup(const std::vector<EvidenceRecord>& evidence, const CorpusSnapshot& snapshot);

}  // namespace cybok
