#pragma once

// Independent reference implementations used to cross-check the library.
// They favour obviousness over speed: nested loops, no indexes, no caching.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cybok/analysis.hpp"
#include "cybok/corpus.hpp"
#include "cybok/index.hpp"
#include "cybok/model.hpp"
#include "cybok/text.hpp"

namespace oracle {

// Literal phrase containment over a token stream.
inline bool contains_phrase(const std::vector<std::string>& doc, const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > doc.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= doc.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < phrase.size() && all; ++j) all = doc[i + j] == phrase[j];
        if (all) return true;
    }
    return false;
}

// "d in av": normalizes every entry on every call and scans it directly.
inline std::vector<std::string> query(const cybok::CorpusSnapshot& snapshot, const std::string& keyword) {
    const auto phrase = cybok::text::normalize(keyword);
    std::vector<std::string> out;
    for (const auto& [id, entry] : snapshot.entries) {
        if (contains_phrase(cybok::text::normalize(entry.name + " " + entry.description), phrase)) {
            out.push_back(id);
        }
    }
    return out;
}

// Finding attack vectors, executed as the nested loop it is written as:
// for each vertex and edge, for each category, for each keyword, for each entry.
inline std::vector<cybok::EvidenceRecord> associate(const cybok::SystemModel& model,
                                                    const cybok::CorpusSnapshot& snapshot) {
    std::vector<cybok::EvidenceRecord> out;
    auto scan = [&](const cybok::ElementRef& ref, const cybok::DescriptorSet& d) {
        for (auto c : cybok::kAllCategories) {
            for (const auto& kw : d.get(c)) {
                const auto phrase = cybok::text::normalize(kw);
                for (const auto& [id, entry] : snapshot.entries) {
                    const auto doc = cybok::text::normalize(entry.name + " " + entry.description);
                    if (contains_phrase(doc, phrase)) out.push_back({ref, c, kw, id});
                }
            }
        }
    };
    for (const auto& [id, a] : model.assets) scan(cybok::ElementRef::asset(id), a.descriptors);
    for (const auto& e : model.edges) scan(cybok::ElementRef::edge(e.id), e.descriptors);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Exhaustive DFS over the raw edge list (no adjacency precomputation, no
// ordering during search); results sorted afterwards.
inline std::vector<cybok::Path> simple_paths(const cybok::SystemModel& model, const std::string& source,
                                             const std::string& target, std::size_t max_len) {
    std::vector<cybok::Path> out;
    cybok::Path cur{{source}, {}};
    std::function<void()> dfs = [&] {
        const auto here = cur.vertices.back();
        if (here == target) {
            out.push_back(cur);
            return;
        }
        if (cur.edges.size() == max_len) return;
        for (const auto& e : model.edges) {
            if (e.source == e.target) continue;
            std::string next;
            if (e.source == here) {
                next = e.target;
            } else if (e.target == here && !model.edge_directed(e)) {
                next = e.source;
            } else {
                continue;
            }
            if (std::find(cur.vertices.begin(), cur.vertices.end(), next) != cur.vertices.end()) continue;
            cur.vertices.push_back(next);
            cur.edges.push_back(e.id);
            dfs();
            cur.vertices.pop_back();
            cur.edges.pop_back();
        }
    };
    dfs();
    std::sort(out.begin(), out.end(), [](const cybok::Path& a, const cybok::Path& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        if (a.vertices != b.vertices) return a.vertices < b.vertices;
        return a.edges < b.edges;
    });
    return out;
}

// Exploit chains as admissibility-filtered exhaustive enumeration.
inline std::vector<cybok::ExploitChain> exploit_chains(const cybok::SystemModel& model,
                                                       const std::vector<cybok::EvidenceRecord>& evidence,
                                                       const std::vector<cybok::AttackSurfaceElement>& surface,
                                                       const std::string& target, std::size_t max_len) {
    auto records_for = [&](const cybok::ElementRef& ref) {
        std::vector<cybok::EvidenceRecord> rs;
        for (const auto& r : evidence) {
            if (r.element == ref) rs.push_back(r);
        }
        return rs;
    };
    auto admissible = [&](const cybok::Path& p, cybok::ExploitChain& chain) {
        std::vector<cybok::ElementRef> refs;
        for (const auto& v : p.vertices) refs.push_back(cybok::ElementRef::asset(v));
        for (const auto& e : p.edges) refs.push_back(cybok::ElementRef::edge(e));
        for (const auto& ref : refs) {
            auto rs = records_for(ref);
            if (rs.empty()) return false;
            chain.evidence[ref] = std::move(rs);
        }
        return true;
    };
    std::vector<cybok::ExploitChain> out;
    for (const auto& s : surface) {
        if (s.asset == target) {
            cybok::ExploitChain c{s.asset, target, {{target}, {}}, true, {}};
            if (admissible(c.path, c)) out.push_back(std::move(c));
            continue;
        }
        if (max_len == 0) continue;
        for (const auto& p : simple_paths(model, s.asset, target, max_len)) {
            cybok::ExploitChain c{s.asset, target, p, false, {}};
            if (admissible(p, c)) out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace oracle
