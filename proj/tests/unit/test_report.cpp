#include <doctest.h>

#include <regex>

#include "cybok/error.hpp"
#include "cybok/report.hpp"
#include "fixtures.hpp"

using namespace cybok;
using nlohmann::json;

namespace {

const AnalysisResult& uas_result() {
    static const AnalysisResult r = [] {
        AnalysisOptions options;
        options.target = "primary_processor";
        return run_analysis(fixtures::uas_model(), fixtures::corpus(), fixtures::corpus_index(), options);
    }();
    return r;
}

std::size_t count(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("run_analysis wires the stages together") {
    const auto& r = uas_result();
    const auto m = fixtures::uas_model();
    CHECK(r.evidence == associate(m, fixtures::corpus_index()));
    CHECK(r.surface == attack_surface(m, r.evidence));
    REQUIRE(r.chains);
    CHECK(r.chains->chains == exploit_chains(m, r.evidence, r.surface, "primary_processor").chains);
    CHECK(r.rollup == rollup(r.evidence, fixtures::corpus()));

    const auto no_target = run_analysis(m, fixtures::corpus(), fixtures::corpus_index());
    CHECK_FALSE(no_target.chains);

    auto other = fixtures::corpus();
    other.entries.erase("CWE-20");
    CHECK_THROWS_AS(run_analysis(m, other, fixtures::corpus_index()), StaleIndexError);
}

TEST_CASE("report document") {
    const auto m = fixtures::uas_model();
    const auto text = render_report(m, fixtures::corpus(), uas_result());
    CHECK(text.back() == '\n');
    CHECK(text == render_report(m, fixtures::corpus(), uas_result()));
    const auto j = json::parse(text);
    CHECK(j.at("format") == "cybok-report");
    CHECK(j.at("format_version") == kReportFormatVersion);
    CHECK(j.at("corpus_ref") == fixtures::corpus().corpus_ref());
    CHECK(j.at("model").at("assets") == m.assets.size());
    CHECK(j.at("evidence").size() == uas_result().evidence.size());
    CHECK(j.at("surface").size() == uas_result().surface.size());
    CHECK(j.at("chains").at("target") == "primary_processor");
    CHECK(j.at("chains").at("items").size() == uas_result().chains->chains.size());
    CHECK(j.at("rollup").contains("asset:primary_processor"));
    for (const auto& row : j.at("table")) {
        for (const auto* key : {"element", "element_name", "attack_vector", "description", "derived"}) {
            CHECK(row.contains(key));
        }
    }
    for (const auto& item : j.at("chains").at("items")) {
        for (const auto& [ref, _] : item.at("evidence").items()) CHECK_NOTHROW(parse_element_ref(ref));
    }

    AnalysisResult plain = uas_result();
    plain.chains.reset();
    plain.options.target.reset();
    CHECK(report_to_json(m, fixtures::corpus(), plain).at("chains").is_null());
}

TEST_CASE("results table") {
    const auto m = fixtures::uas_model();
    const auto& r = uas_result();
    const auto rows = results_table(m, r.evidence, r.rollup, fixtures::corpus());
    const TableRow gps{ElementRef::asset("gps"), "NMEA GPS", "CAPEC-627", "Counterfeit GPS Signals", false};
    CHECK(std::find(rows.begin(), rows.end(), gps) != rows.end());

    // Grouped by element; direct rows precede derived ones; identifiers sorted within each group.
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].element != rows[i - 1].element) continue;
        CHECK((rows[i - 1].derived <= rows[i].derived));
        if (rows[i - 1].derived == rows[i].derived) CHECK(rows[i - 1].attack_vector < rows[i].attack_vector);
    }
    std::set<std::pair<ElementRef, std::string>> distinct;
    for (const auto& row : rows) CHECK(distinct.insert({row.element, row.attack_vector}).second);

    // Every directly matched pair has a row.
    for (const auto& e : r.evidence) CHECK(distinct.count({e.element, e.attack_vector}) == 1);

    const auto text = emit_results_table(rows);
    CHECK(text.rfind("Model Element", 0) == 0);
    CHECK(text.find("Counterfeit GPS Signals") != std::string::npos);
    CHECK(count(text, "\n") >= rows.size() + 2);
    CHECK(emit_results_table({}).find("Model Element") != std::string::npos);
}

TEST_CASE("short descriptions") {
    AttackVectorEntry e;
    e.identifier = "CVE-2000-0001";
    e.description = "First sentence. Second sentence.";
    CHECK(short_description(e) == "First sentence.");
    e.name = "Named";
    CHECK(short_description(e) == "Named");
}

TEST_CASE("element references") {
    CHECK(parse_element_ref("asset:gps") == ElementRef::asset("gps"));
    CHECK(parse_element_ref("edge:imu_bus") == ElementRef::edge("imu_bus"));
    CHECK_THROWS_AS(parse_element_ref("gps"), InvalidArgument);
    CHECK_THROWS_AS(parse_element_ref("node:gps"), InvalidArgument);
}

TEST_CASE("topology rendering lists every asset and edge exactly once") {
    const auto m = fixtures::uas_model();
    const auto dot = render_graph(m, RenderSpec{});
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.back() == '\n');
    for (const auto& [id, _] : m.assets) CHECK_MESSAGE(count(dot, "  \"" + id + "\" [label=") == 1, id);
    for (const auto& e : m.edges) CHECK_MESSAGE(count(dot, "[id=\"" + e.id + "\"") == 1, e.id);
    CHECK(dot.find("NMEA GPS") != std::string::npos);
    CHECK(dot.find("dir=none") != std::string::npos);
    CHECK(dot.find("penwidth") == std::string::npos);
    CHECK(dot == render_graph(m, RenderSpec{}));
}

TEST_CASE("surface and chain rendering") {
    const auto m = fixtures::uas_model();
    const auto& r = uas_result();

    const auto surface = surface_render_spec(r.surface);
    CHECK(surface.highlight.size() == r.surface.size());
    const auto sdot = render_graph(m, surface);
    CHECK(count(sdot, "fillcolor") == r.surface.size());

    const auto chains = chains_render_spec(*r.chains);
    CHECK(chains.highlight.count(ElementRef::asset("primary_processor")) == 1);
    CHECK(chains.highlight.count(ElementRef::edge("imagery_link")) == 1);
    const auto cdot = render_graph(m, chains);
    CHECK(cdot.find("CVE-2013-7266") != std::string::npos);

    const auto one = chains_render_spec(*r.chains, 0);
    std::set<ElementRef> expected;
    for (const auto& v : r.chains->chains[0].path.vertices) expected.insert(ElementRef::asset(v));
    for (const auto& e : r.chains->chains[0].path.edges) expected.insert(ElementRef::edge(e));
    CHECK(one.highlight == expected);
    CHECK_THROWS_AS(chains_render_spec(*r.chains, r.chains->chains.size()), InvalidArgument);
}

TEST_CASE("specs rebuilt from a report equal the in-memory ones") {
    const auto m = fixtures::uas_model();
    const auto& r = uas_result();
    const auto report = json::parse(render_report(m, fixtures::corpus(), r));
    const auto s = render_spec_from_report(report, RenderKind::Surface);
    CHECK(s.highlight == surface_render_spec(r.surface).highlight);
    CHECK(s.annotations == surface_render_spec(r.surface).annotations);
    const auto c = render_spec_from_report(report, RenderKind::Chains);
    CHECK(render_graph(m, c) == render_graph(m, chains_render_spec(*r.chains)));
    CHECK(render_spec_from_report(report, RenderKind::Topology).highlight.empty());

    AnalysisResult plain = r;
    plain.chains.reset();
    plain.options.target.reset();
    const auto no_chains = report_to_json(m, fixtures::corpus(), plain);
    CHECK_THROWS_AS(render_spec_from_report(no_chains, RenderKind::Chains), InvalidArgument);
}

TEST_CASE("render spec naming unknown elements is rejected") {
    const auto m = fixtures::uas_model();
    RenderSpec spec;
    spec.kind = RenderKind::Surface;
    spec.highlight.insert(ElementRef::asset("ghost"));
    CHECK_THROWS_AS(render_graph(m, spec), ValidationError);
    RenderSpec notes;
    notes.annotations[ElementRef::edge("ghost_link")] = {"x"};
    CHECK_THROWS_AS(render_graph(m, notes), ValidationError);
}

TEST_CASE("render kinds") {
    CHECK(render_kind_from_string("topology") == RenderKind::Topology);
    CHECK(render_kind_from_string("chains") == RenderKind::Chains);
    CHECK_THROWS_AS(render_kind_from_string("heatmap"), InvalidArgument);
}

TEST_CASE("labels with quotes are escaped in DOT output") {
    SystemModel m;
    m.assets["a"] = Asset{"a", "say \"hi\"\nthere", {}, {}};
    const auto dot = render_graph(m, RenderSpec{});
    CHECK(dot.find(R"(say \"hi\"\nthere)") != std::string::npos);
}
