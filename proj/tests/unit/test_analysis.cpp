#include <doctest.h>

#include "cybok/analysis.hpp"
#include "cybok/error.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cybok;

namespace {

bool has(const std::vector<EvidenceRecord>& ev, const std::string& element_id, const std::string& av) {
    return std::any_of(ev.begin(), ev.end(),
                       [&](const EvidenceRecord& r) { return r.element.id == element_id && r.attack_vector == av; });
}

SystemModel triangle(bool directed) {
    SystemModel m;
    m.directed = directed;
    for (const auto* id : {"a", "b", "c"}) m.assets[id] = Asset{id, "", {}, {}};
    m.edges = {{"ab", "a", "b", "", {}, {}, {}}, {"bc", "b", "c", "", {}, {}, {}}, {"ac", "a", "c", "", {}, {}, {}}};
    return m;
}

void check_chain_invariants(const ExploitChain& c, const std::vector<AttackSurfaceElement>& surface,
                            const std::string& target) {
    CHECK(std::any_of(surface.begin(), surface.end(), [&](const auto& s) { return s.asset == c.source; }));
    REQUIRE_FALSE(c.path.vertices.empty());
    CHECK(c.path.vertices.front() == c.source);
    CHECK(c.path.vertices.back() == target);
    CHECK(c.path.vertices.size() == c.path.edges.size() + 1);
    std::set<std::string> seen(c.path.vertices.begin(), c.path.vertices.end());
    CHECK(seen.size() == c.path.vertices.size());
    for (const auto& v : c.path.vertices) {
        auto it = c.evidence.find(ElementRef::asset(v));
        CHECK((it != c.evidence.end() && !it->second.empty()));
    }
    for (const auto& e : c.path.edges) {
        auto it = c.evidence.find(ElementRef::edge(e));
        CHECK((it != c.evidence.end() && !it->second.empty()));
    }
}

}  // namespace

TEST_CASE("associate on the UAS fixture") {
    const auto m = fixtures::uas_model();
    const auto ev = associate(m, fixtures::corpus_index());
    CHECK(std::is_sorted(ev.begin(), ev.end()));
    CHECK(std::adjacent_find(ev.begin(), ev.end()) == ev.end());
    const EvidenceRecord zigbee{ElementRef::asset("imagery_radio"), Category::Communication, "ZigBee", "CVE-2015-8732"};
    CHECK(std::binary_search(ev.begin(), ev.end(), zigbee));
    CHECK(has(ev, "gps", "CAPEC-627"));
    CHECK(has(ev, "gps", "CAPEC-628"));
    // Every record can be re-checked against the index.
    for (const auto& r : ev) {
        const auto hits = fixtures::corpus_index().query(r.keyword);
        CHECK(std::binary_search(hits.begin(), hits.end(), r.attack_vector));
    }
}

TEST_CASE("associate on an empty-descriptor model") {
    SystemModel m;
    m.assets["a"] = Asset{"a", "A", {}, {}};
    CHECK(associate(m, fixtures::corpus_index()).empty());
}

TEST_CASE("duplicate keywords across categories are kept, identical tuples are not") {
    SystemModel m;
    Asset a{"a", "", {}, {}};
    a.descriptors.set(Category::Communication, {"GPS"});
    a.descriptors.set(Category::EntryPoints, {"GPS"});
    m.assets["a"] = a;
    const auto ev = associate(m, fixtures::corpus_index());
    const auto n = std::count_if(ev.begin(), ev.end(), [](const auto& r) { return r.attack_vector == "CAPEC-627"; });
    CHECK(n == 2);
}

TEST_CASE("associate equals the literal nested-loop scan") {
    gen::Rng rng(1234);
    for (int i = 0; i < 40; ++i) {
        const auto snap = gen::corpus(rng, 5 + static_cast<std::size_t>(i) * 5);
        const auto idx = build_index(snap);
        const auto m = gen::model(rng, 1 + i % 10, static_cast<std::size_t>(i % 10), 0.6);
        CHECK(associate(m, idx) == oracle::associate(m, snap));
    }
    CHECK(associate(fixtures::uas_model(), fixtures::corpus_index()) ==
          oracle::associate(fixtures::uas_model(), fixtures::corpus()));
}

TEST_CASE("stale index is rejected") {
    auto other = fixtures::corpus();
    other.entries.erase(other.entries.begin());
    CHECK_THROWS_AS(require_matching_index(fixtures::corpus_index(), other), StaleIndexError);
    CHECK_NOTHROW(require_matching_index(fixtures::corpus_index(), fixtures::corpus()));
}

TEST_CASE("attack surface") {
    const auto m = fixtures::uas_model();
    const auto ev = associate(m, fixtures::corpus_index());
    const auto surface = attack_surface(m, ev);
    std::vector<std::string> ids;
    for (const auto& s : surface) {
        ids.push_back(s.asset);
        CHECK_FALSE(s.triggering_keywords.empty());
        for (const auto& t : s.triggering_keywords) {
            const EvidenceRecord r{ElementRef::asset(s.asset), Category::EntryPoints, t.keyword, t.attack_vector};
            CHECK(std::binary_search(ev.begin(), ev.end(), r));
        }
    }
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    for (const auto* id : {"gcs_radio", "telemetry_radio", "imagery_radio", "gcs_laptop", "gps", "camera"}) {
        CHECK_MESSAGE(std::find(ids.begin(), ids.end(), id) != ids.end(), id);
    }

    SUBCASE("no entry points anywhere") {
        auto bare = m;
        for (auto& [_, a] : bare.assets) a.descriptors.set(Category::EntryPoints, {});
        CHECK(attack_surface(bare, associate(bare, fixtures::corpus_index())).empty());
    }
    SUBCASE("entry point matching nothing") {
        auto edited = m;
        edited.assets.at("gps").descriptors.set(Category::EntryPoints, {"nonexistentprotocolxyz"});
        const auto s = attack_surface(edited, associate(edited, fixtures::corpus_index()));
        CHECK(std::none_of(s.begin(), s.end(), [](const auto& x) { return x.asset == "gps"; }));
    }
}

TEST_CASE("surface membership iff entry_points evidence") {
    gen::Rng rng(55);
    for (int i = 0; i < 30; ++i) {
        const auto snap = gen::corpus(rng, 80);
        const auto idx = build_index(snap);
        auto m = gen::model(rng, 8, 10, 0.7);
        // Edges with entry points never join the surface.
        if (!m.edges.empty()) m.edges[0].descriptors.set(Category::EntryPoints, {"buffer", "GPS"});
        const auto ev = associate(m, idx);
        const auto surface = attack_surface(m, ev);
        std::set<std::string> expected;
        for (const auto& r : ev) {
            if (r.category == Category::EntryPoints && r.element.is_asset()) expected.insert(r.element.id);
        }
        std::set<std::string> got;
        for (const auto& s : surface) got.insert(s.asset);
        CHECK(got == expected);
        for (const auto& id : got) CHECK(m.assets.count(id) == 1);
    }
}

TEST_CASE("simple path enumeration") {
    SUBCASE("undirected triangle") {
        const auto ps = enumerate_simple_paths(triangle(false), "a", "c", 8);
        REQUIRE(ps.paths.size() == 2);
        CHECK(ps.paths[0].vertices == std::vector<std::string>{"a", "c"});
        CHECK(ps.paths[1].vertices == std::vector<std::string>{"a", "b", "c"});
        CHECK_FALSE(ps.truncated);
    }
    SUBCASE("direction is respected") {
        CHECK(enumerate_simple_paths(triangle(true), "c", "a", 8).paths.empty());
        CHECK(enumerate_simple_paths(triangle(true), "a", "c", 8).paths.size() == 2);
    }
    SUBCASE("max_len bounds the path length") {
        const auto ps = enumerate_simple_paths(triangle(false), "a", "c", 1);
        REQUIRE(ps.paths.size() == 1);
        CHECK(ps.paths[0].edges == std::vector<std::string>{"ac"});
    }
    SUBCASE("parallel edges give distinct paths") {
        SystemModel m;
        m.assets = {{"a", Asset{"a", "", {}, {}}}, {"b", Asset{"b", "", {}, {}}}};
        m.edges = {{"e2", "a", "b", "", {}, {}, {}}, {"e1", "a", "b", "", {}, {}, {}}};
        const auto ps = enumerate_simple_paths(m, "a", "b", 3);
        REQUIRE(ps.paths.size() == 2);
        CHECK(ps.paths[0].edges == std::vector<std::string>{"e1"});
        CHECK(ps.paths[1].edges == std::vector<std::string>{"e2"});
    }
    SUBCASE("disconnected") {
        auto m = triangle(false);
        m.assets["d"] = Asset{"d", "", {}, {}};
        CHECK(enumerate_simple_paths(m, "a", "d", 8).paths.empty());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(enumerate_simple_paths(triangle(false), "a", "zz", 8), NotFoundError);
        CHECK_THROWS_AS(enumerate_simple_paths(triangle(false), "zz", "a", 8), NotFoundError);
        CHECK_THROWS_AS(enumerate_simple_paths(triangle(false), "a", "a", 8), InvalidArgument);
        CHECK_THROWS_AS(enumerate_simple_paths(triangle(false), "a", "c", 0), InvalidArgument);
    }
    SUBCASE("truncation") {
        // Complete graph on 8 vertices has far more than 50 simple a->h paths.
        SystemModel m;
        m.directed = false;
        for (char c = 'a'; c <= 'h'; ++c) m.assets[std::string(1, c)] = Asset{std::string(1, c), "", {}, {}};
        int n = 0;
        for (char x = 'a'; x <= 'h'; ++x) {
            for (char y = static_cast<char>(x + 1); y <= 'h'; ++y) {
                m.edges.push_back({"e" + std::to_string(n++), std::string(1, x), std::string(1, y), "", {}, {}, {}});
            }
        }
        const auto ps = enumerate_simple_paths(m, "a", "h", 8, 50);
        CHECK(ps.paths.size() == 50);
        CHECK(ps.truncated);
        CHECK(enumerate_simple_paths(m, "a", "h", 8).paths.size() == oracle::simple_paths(m, "a", "h", 8).size());
    }
}

TEST_CASE("path enumeration equals exhaustive DFS on small random graphs") {
    gen::Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto n = 2 + static_cast<std::size_t>(i % 7);
        const auto m = gen::model(rng, n, n + static_cast<std::size_t>(i % 6), 0.0);
        const std::string s = "v0", t = "v" + std::to_string(n - 1);
        const auto max_len = 1 + static_cast<std::size_t>(i % 8);
        CHECK(enumerate_simple_paths(m, s, t, max_len).paths == oracle::simple_paths(m, s, t, max_len));
    }
}

TEST_CASE("exploit chains on the UAS fixture") {
    const auto m = fixtures::uas_model();
    const auto ev = associate(m, fixtures::corpus_index());
    const auto surface = attack_surface(m, ev);
    const auto chains = exploit_chains(m, ev, surface, "primary_processor");
    CHECK_FALSE(chains.truncated);
    const ExploitChain* link = nullptr;
    for (const auto& c : chains.chains) {
        check_chain_invariants(c, surface, "primary_processor");
        if (c.source == "imagery_radio" && c.path.edges == std::vector<std::string>{"imagery_link"}) link = &c;
    }
    REQUIRE(link);
    auto avs = [&](const ElementRef& ref) {
        std::set<std::string> out;
        for (const auto& r : link->evidence.at(ref)) out.insert(r.attack_vector);
        return out;
    };
    const auto radio = avs(ElementRef::asset("imagery_radio"));
    for (const auto* id : {"CAPEC-67", "CWE-20", "CVE-2015-8732"}) CHECK_MESSAGE(radio.count(id), id);
    const auto edge = avs(ElementRef::edge("imagery_link"));
    for (const auto* id : {"CVE-2013-7266", "CWE-789", "CWE-770", "CAPEC-130"}) CHECK_MESSAGE(edge.count(id), id);

    CHECK_THROWS_AS(exploit_chains(m, ev, surface, "nope"), NotFoundError);
}

TEST_CASE("exploit chain corner cases") {
    const auto m = fixtures::uas_model();
    const auto ev = associate(m, fixtures::corpus_index());
    const auto surface = attack_surface(m, ev);
    SUBCASE("surface asset equal to the target yields a trivial chain") {
        const auto chains = exploit_chains(m, ev, surface, "gps");
        auto it = std::find_if(chains.chains.begin(), chains.chains.end(), [](const auto& c) { return c.trivial; });
        REQUIRE(it != chains.chains.end());
        CHECK(it->path.vertices == std::vector<std::string>{"gps"});
        CHECK(it->path.edges.empty());
    }
    SUBCASE("unreachable target") {
        auto island = m;
        island.assets["island"] = Asset{"island", "", {}, {}};
        island.assets["island"].descriptors.set(Category::Software, {"buffer"});
        const auto ev2 = associate(island, fixtures::corpus_index());
        CHECK(exploit_chains(island, ev2, attack_surface(island, ev2), "island").chains.empty());
    }
    SUBCASE("an evidence-free edge blocks the path") {
        auto edited = m;
        for (auto& e : edited.edges) {
            if (e.id == "imagery_link") e.descriptors = DescriptorSet{};
        }
        const auto ev2 = associate(edited, fixtures::corpus_index());
        const auto chains = exploit_chains(edited, ev2, attack_surface(edited, ev2), "primary_processor");
        for (const auto& c : chains.chains) {
            CHECK(std::find(c.path.edges.begin(), c.path.edges.end(), "imagery_link") == c.path.edges.end());
        }
    }
}

TEST_CASE("exploit chains equal admissibility-filtered exhaustive enumeration") {
    gen::Rng rng(99);
    for (int i = 0; i < 150; ++i) {
        const auto snap = gen::corpus(rng, 40);
        const auto idx = build_index(snap);
        const auto n = 2 + static_cast<std::size_t>(i % 7);
        const auto m = gen::model(rng, n, n + static_cast<std::size_t>(i % 5), 0.8);
        const auto ev = associate(m, idx);
        const auto surface = attack_surface(m, ev);
        const auto target = "v" + std::to_string(i % n);
        const auto max_len = static_cast<std::size_t>(i % 9);
        const auto got = exploit_chains(m, ev, surface, target, max_len);
        CHECK(got.chains == oracle::exploit_chains(m, ev, surface, target, max_len));
        for (const auto& c : got.chains) check_chain_invariants(c, surface, target);
    }
}

TEST_CASE("removing all evidence of an on-path element removes exactly the chains through it") {
    const auto m = fixtures::uas_model();
    const auto ev = associate(m, fixtures::corpus_index());
    const auto surface = attack_surface(m, ev);
    const auto before = exploit_chains(m, ev, surface, "primary_processor");
    for (const auto& victim : {ElementRef::edge("imagery_downlink"), ElementRef::edge("imagery_link"),
                               ElementRef::asset("gcs_radio"), ElementRef::edge("telemetry_link")}) {
        std::vector<EvidenceRecord> pruned;
        for (const auto& r : ev) {
            if (r.element != victim) pruned.push_back(r);
        }
        // Keep the surface fixed so only admissibility changes.
        const auto after = exploit_chains(m, pruned, surface, "primary_processor");
        std::vector<ExploitChain> expected;
        for (const auto& c : before.chains) {
            const auto& seq = victim.is_asset() ? c.path.vertices : c.path.edges;
            if (std::find(seq.begin(), seq.end(), victim.id) == seq.end()) expected.push_back(c);
        }
        CHECK(after.chains == expected);
    }
}

TEST_CASE("keyword deletion never adds evidence") {
    gen::Rng rng(31);
    const auto base = fixtures::uas_model();
    for (int i = 0; i < 40; ++i) {
        auto m = base;
        auto refs = all_descriptors(m);
        const auto& victim = refs[std::uniform_int_distribution<std::size_t>(0, refs.size() - 1)(rng)];
        auto kws = m.descriptors(victim.element).get(victim.category);
        kws.erase(std::find(kws.begin(), kws.end(), victim.keyword));
        m.descriptors(victim.element).set(victim.category, kws);
        const auto before = associate(base, fixtures::corpus_index());
        const auto after = associate(m, fixtures::corpus_index());
        CHECK(std::includes(before.begin(), before.end(), after.begin(), after.end()));
    }
}

TEST_CASE("rollup") {
    const auto& snap = fixtures::corpus();
    SUBCASE("CVE mapped to CWE-20") {
        const std::vector<EvidenceRecord> ev = {{ElementRef::asset("x"), Category::Software, "length value", "CVE-2013-7266"}};
        const auto r = rollup(ev, snap);
        const auto& x = r.per_element.at(ElementRef::asset("x"));
        CHECK(x.cves == std::set<std::string>{"CVE-2013-7266"});
        CHECK(x.derived_cwes.count("CWE-20") == 1);
        CHECK(x.derived_capecs.count("CAPEC-67") == 1);   // CWE-20 -> CAPEC-67
        CHECK(x.derived_capecs.count("CAPEC-10") == 0);   // dangling, dropped
        CHECK(x.direct_cwes.empty());
    }
    SUBCASE("only CAPEC matches") {
        const std::vector<EvidenceRecord> ev = {{ElementRef::asset("x"), Category::Software, "GPS", "CAPEC-627"}};
        const auto r = rollup(ev, snap);
        const auto& x = r.per_element.at(ElementRef::asset("x"));
        CHECK(x.derived_cwes.empty());
        CHECK(x.derived_capecs.empty());
        CHECK(x.direct_capecs == std::set<std::string>{"CAPEC-627"});
    }
    SUBCASE("two CVEs sharing CWE-20") {
        const std::vector<EvidenceRecord> ev = {
            {ElementRef::asset("x"), Category::Software, "a", "CVE-2015-6244"},
            {ElementRef::asset("x"), Category::Software, "b", "CVE-2015-8732"}};
        const auto r = rollup(ev, snap);
        const auto& x = r.per_element.at(ElementRef::asset("x"));
        CHECK(x.cves.size() == 2);
        CHECK(x.derived_cwes == std::set<std::string>{"CWE-20"});
    }
    SUBCASE("unknown identifiers are skipped with a warning") {
        const std::vector<EvidenceRecord> ev = {{ElementRef::asset("x"), Category::Software, "a", "CWE-99999"}};
        const auto r = rollup(ev, snap);
        CHECK(r.warnings.size() == 1);
    }
    SUBCASE("derived sets are the union of related refs restricted to the snapshot") {
        const auto m = fixtures::uas_model();
        const auto ev = associate(m, fixtures::corpus_index());
        const auto r = rollup(ev, snap);
        for (const auto& [ref, roll] : r.per_element) {
            std::set<std::string> cwes, capecs;
            for (const auto& rec : ev) {
                if (rec.element != ref) continue;
                const auto* e = snap.find(rec.attack_vector);
                if (e->database == Database::CVE) {
                    for (const auto& w : e->related_weaknesses) {
                        if (snap.find(w)) cwes.insert(w);
                    }
                }
                if (e->database != Database::CAPEC) {
                    for (const auto& a : e->related_attack_patterns) {
                        if (snap.find(a)) capecs.insert(a);
                    }
                }
            }
            for (const auto& w : cwes) {
                for (const auto& a : snap.find(w)->related_attack_patterns) {
                    if (snap.find(a)) capecs.insert(a);
                }
            }
            CHECK(roll.derived_cwes == cwes);
            CHECK(roll.derived_capecs == capecs);
        }
    }
}
