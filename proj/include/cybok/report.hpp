#pragma once

// Pipeline driver, report document, results table and graph rendering.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cybok/analysis.hpp"

namespace cybok {

struct AnalysisOptions {
    std::optional<std::string> target;
    std::size_t max_len = kDefaultMaxPathLength;
};

struct AnalysisResult {
    AnalysisOptions options;
    std::vector<EvidenceRecord> evidence;
    std::vector<AttackSurfaceElement> surface;
    std::optional<ChainSet> chains;  // only when a target was requested
    AbstractionRollup rollup;
};

// associate -> attack_surface -> (exploit_chains) -> rollup. Throws
// StaleIndexError when the index does not belong to the snapshot.
AnalysisResult run_analysis(const SystemModel& model, const CorpusSnapshot& snapshot, const SearchIndex& index,
                            const AnalysisOptions& options = {});

struct TableRow {
    ElementRef element;
    std::string element_name;
    std::string attack_vector;
    std::string description;
    bool derived = false;  // reached through the rollup, not matched directly

    bool operator==(const TableRow&) const = default;
};

// Distinct (element, attack vector) rows grouped by element; within an element
// direct matches first, then rollup-derived ones, each by identifier.
std::vector<TableRow> results_table(const SystemModel& model, const std::vector<EvidenceRecord>& evidence,
                                    const AbstractionRollup& rollup, const CorpusSnapshot& snapshot);
std::string emit_results_table(const std::vector<TableRow>& rows);

// Entry title, or the first sentence of its description when it has none.
std::string short_description(const AttackVectorEntry& entry);

inline constexpr int kReportFormatVersion = 1;

nlohmann::json report_to_json(const SystemModel& model, const CorpusSnapshot& snapshot,
                              const AnalysisResult& result);
// Pretty-printed report with a trailing newline; byte-stable for equal input.
std::string render_report(const SystemModel& model, const CorpusSnapshot& snapshot, const AnalysisResult& result);

nlohmann::json evidence_to_json(const EvidenceRecord& r);
nlohmann::json surface_to_json(const std::vector<AttackSurfaceElement>& surface);
nlohmann::json chains_to_json(const ChainSet& chains, const std::string& target, std::size_t max_len);
nlohmann::json entry_to_json(const AttackVectorEntry& entry);

// "asset:<id>" / "edge:<id>"; throws InvalidArgument otherwise.
ElementRef parse_element_ref(std::string_view text);

enum class RenderKind { Topology, Surface, Chains };

RenderKind render_kind_from_string(std::string_view name);

struct RenderSpec {
    RenderKind kind = RenderKind::Topology;
    std::set<ElementRef> highlight;
    std::map<ElementRef, std::vector<std::string>> annotations;
};

RenderSpec surface_render_spec(const std::vector<AttackSurfaceElement>& surface);
// Highlights every element of the selected chains (all when `only` is empty).
RenderSpec chains_render_spec(const ChainSet& chains, std::optional<std::size_t> only = std::nullopt);
// Builds a spec from a report document written by render_report.
RenderSpec render_spec_from_report(const nlohmann::json& report, RenderKind kind,
                                   std::optional<std::size_t> only_chain = std::nullopt);

// Graphviz DOT. Throws ValidationError when the spec names elements the model
// does not have.
std::string render_graph(const SystemModel& model, const RenderSpec& spec);

}  // namespace cybok
