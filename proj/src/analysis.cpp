#include "cybok/analysis.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "cybok/error.hpp"
#include "cybok/text.hpp"

namespace cybok {

std::vector<EvidenceRecord> associate(const SystemModel& model, const SearchIndex& index) {
    std::vector<EvidenceRecord> records;
    // Keywords repeat across elements; each is normalized and looked up once.
    std::map<std::string, std::vector<std::string>> cache;
    for (const auto& d : all_descriptors(model)) {
        auto it = cache.find(d.keyword);
        if (it == cache.end()) it = cache.emplace(d.keyword, index.query(d.keyword)).first;
        for (const auto& av : it->second) records.push_back({d.element, d.category, d.keyword, av});
    }
    std::sort(records.begin(), records.end());
    records.erase(std::unique(records.begin(), records.end()), records.end());
    return records;
}

void require_matching_index(const SearchIndex& index, const CorpusSnapshot& snapshot) {
    if (index.corpus_ref() != snapshot.corpus_ref()) {
        throw StaleIndexError("index was built from corpus " + index.corpus_ref() + " but the snapshot is " +
                              snapshot.corpus_ref() + "; rebuild it with `cybok index`");
    }
}

std::vector<AttackSurfaceElement> attack_surface(const SystemModel& model,
                                                 const std::vector<EvidenceRecord>& evidence) {
    std::map<std::string, std::set<SurfaceTrigger>> triggers;
    for (const auto& r : evidence) {
        if (!r.element.is_asset() || r.category != Category::EntryPoints) continue;
        if (!model.find_asset(r.element.id)) continue;
        triggers[r.element.id].insert({r.keyword, r.attack_vector});
    }
    std::vector<AttackSurfaceElement> surface;
    for (auto& [asset, set] : triggers) {
        surface.push_back({asset, std::vector<SurfaceTrigger>(set.begin(), set.end())});
    }
    return surface;
}

namespace {

struct Arc {
    std::string to;
    std::string edge;
};

using Adjacency = std::unordered_map<std::string, std::vector<Arc>>;

Adjacency build_adjacency(const SystemModel& model) {
    Adjacency adj;
    for (const auto& e : model.edges) {
        if (e.source == e.target) continue;  // a loop never lies on a simple path
        adj[e.source].push_back({e.target, e.id});
        if (!model.edge_directed(e)) adj[e.target].push_back({e.source, e.id});
    }
    for (auto& [v, arcs] : adj) {
        std::sort(arcs.begin(), arcs.end(),
                  [](const Arc& a, const Arc& b) { return std::tie(a.to, a.edge) < std::tie(b.to, b.edge); });
    }
    return adj;
}

bool path_order(const Path& a, const Path& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return std::tie(a.vertices, a.edges) < std::tie(b.vertices, b.edges);
}

}  // namespace

PathSet enumerate_simple_paths(const SystemModel& model, const std::string& source, const std::string& target,
                               std::size_t max_len, std::size_t limit) {
    if (!model.find_asset(source)) throw NotFoundError("unknown source asset '" + source + "'");
    if (!model.find_asset(target)) throw NotFoundError("unknown target asset '" + target + "'");
    if (source == target) throw InvalidArgument("path source and target must differ");
    if (max_len < 1) throw InvalidArgument("max_len must be at least 1");

    const auto adj = build_adjacency(model);
    PathSet out;
    Path current;
    current.vertices.push_back(source);
    std::set<std::string> on_path{source};

    std::function<bool(const std::string&)> dfs = [&](const std::string& v) -> bool {
        auto it = adj.find(v);
        if (it == adj.end()) return true;
        for (const auto& arc : it->second) {
            if (on_path.count(arc.to)) continue;
            current.vertices.push_back(arc.to);
            current.edges.push_back(arc.edge);
            if (arc.to == target) {
                if (out.paths.size() == limit) {
                    out.truncated = true;
                    return false;
                }
                out.paths.push_back(current);
            } else if (current.length() < max_len) {
                on_path.insert(arc.to);
                const bool more = dfs(arc.to);
                on_path.erase(arc.to);
                if (!more) return false;
            }
            current.vertices.pop_back();
            current.edges.pop_back();
        }
        return true;
    };
    dfs(source);
    std::sort(out.paths.begin(), out.paths.end(), path_order);
    return out;
}

ChainSet exploit_chains(const SystemModel& model, const std::vector<EvidenceRecord>& evidence,
                        const std::vector<AttackSurfaceElement>& surface, const std::string& target,
                        std::size_t max_len) {
    if (!model.find_asset(target)) throw NotFoundError("unknown target asset '" + target + "'");

    std::map<ElementRef, std::vector<EvidenceRecord>> by_element;
    for (const auto& r : evidence) by_element[r.element].push_back(r);

    auto chain_for = [&](const std::string& source, Path path, bool trivial) -> std::optional<ExploitChain> {
        ExploitChain chain{source, target, std::move(path), trivial, {}};
        auto admit = [&](const ElementRef& ref) {
            auto it = by_element.find(ref);
            if (it == by_element.end() || it->second.empty()) return false;
            chain.evidence.emplace(ref, it->second);
            return true;
        };
        for (const auto& v : chain.path.vertices) {
            if (!admit(ElementRef::asset(v))) return std::nullopt;
        }
        for (const auto& e : chain.path.edges) {
            if (!admit(ElementRef::edge(e))) return std::nullopt;
        }
        return chain;
    };

    ChainSet out;
    for (const auto& s : surface) {
        if (!model.find_asset(s.asset)) continue;
        if (s.asset == target) {
            if (auto c = chain_for(s.asset, Path{{target}, {}}, true)) out.chains.push_back(std::move(*c));
            continue;
        }
        if (max_len == 0) continue;
        auto paths = enumerate_simple_paths(model, s.asset, target, max_len);
        out.truncated = out.truncated || paths.truncated;
        for (auto& p : paths.paths) {
            if (auto c = chain_for(s.asset, std::move(p), false)) out.chains.push_back(std::move(*c));
        }
    }
    return out;
}

AbstractionRollup rollup(const std::vector<EvidenceRecord>& evidence, const CorpusSnapshot& snapshot) {
    AbstractionRollup out;
    std::set<std::string> warned;
    auto lookup = [&](const std::string& id) -> const AttackVectorEntry* {
        const auto* e = snapshot.find(id);
        if (!e && warned.insert(id).second) out.warnings.push_back("skipping unknown identifier " + id);
        return e;
    };
    auto add_present = [&](std::set<std::string>& into, const std::set<std::string>& ids) {
        for (const auto& id : ids) {
            if (snapshot.find(id)) into.insert(id);
        }
    };

    for (const auto& r : evidence) {
        const auto* entry = lookup(r.attack_vector);
        if (!entry) continue;
        auto& roll = out.per_element[r.element];
        switch (entry->database) {
            case Database::CVE:
                roll.cves.insert(entry->identifier);
                add_present(roll.derived_cwes, entry->related_weaknesses);
                add_present(roll.derived_capecs, entry->related_attack_patterns);
                break;
            case Database::CWE:
                roll.direct_cwes.insert(entry->identifier);
                add_present(roll.derived_capecs, entry->related_attack_patterns);
                break;
            case Database::CAPEC:
                roll.direct_capecs.insert(entry->identifier);
                break;
        }
    }
    for (auto& [ref, roll] : out.per_element) {
        for (const auto& cwe : roll.derived_cwes) {
            if (const auto* entry = snapshot.find(cwe)) add_present(roll.derived_capecs, entry->related_attack_patterns);
        }
    }
    return out;
}

}  // namespace cybok
