#include <algorithm>

#include "cybok/error.hpp"
#include "cybok/report.hpp"

namespace cybok {

using nlohmann::json;

RenderKind render_kind_from_string(std::string_view name) {
    if (name == "topology") return RenderKind::Topology;
    if (name == "surface") return RenderKind::Surface;
    if (name == "chains") return RenderKind::Chains;
    throw InvalidArgument("unknown render kind '" + std::string(name) + "' (topology|surface|chains)");
}

namespace {

void annotate(RenderSpec& spec, const ElementRef& ref, const std::string& note) {
    auto& list = spec.annotations[ref];
    if (std::find(list.begin(), list.end(), note) == list.end()) list.push_back(note);
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string label_for(const std::string& name, const std::vector<std::string>* notes) {
    std::string label = name;
    if (notes) {
        for (const auto& n : *notes) label += (label.empty() ? "" : "\n") + n;
    }
    return quote(label);
}

}  // namespace

RenderSpec surface_render_spec(const std::vector<AttackSurfaceElement>& surface) {
    RenderSpec spec;
    spec.kind = RenderKind::Surface;
    for (const auto& s : surface) {
        const auto ref = ElementRef::asset(s.asset);
        spec.highlight.insert(ref);
        for (const auto& t : s.triggering_keywords) annotate(spec, ref, t.keyword + ": " + t.attack_vector);
    }
    return spec;
}

RenderSpec chains_render_spec(const ChainSet& chains, std::optional<std::size_t> only) {
    RenderSpec spec;
    spec.kind = RenderKind::Chains;
    for (std::size_t i = 0; i < chains.chains.size(); ++i) {
        if (only && *only != i) continue;
        const auto& c = chains.chains[i];
        for (const auto& v : c.path.vertices) spec.highlight.insert(ElementRef::asset(v));
        for (const auto& e : c.path.edges) spec.highlight.insert(ElementRef::edge(e));
        for (const auto& [ref, records] : c.evidence) {
            for (const auto& r : records) annotate(spec, ref, r.attack_vector);
        }
    }
    if (only && *only >= chains.chains.size()) {
        throw InvalidArgument("chain index " + std::to_string(*only) + " out of range");
    }
    for (auto& [ref, notes] : spec.annotations) std::sort(notes.begin(), notes.end());
    return spec;
}

RenderSpec render_spec_from_report(const json& report, RenderKind kind, std::optional<std::size_t> only_chain) {
    if (kind == RenderKind::Topology) return RenderSpec{};
    if (kind == RenderKind::Surface) {
        std::vector<AttackSurfaceElement> surface;
        for (const auto& s : report.at("surface")) {
            AttackSurfaceElement el{s.at("asset").get<std::string>(), {}};
            for (const auto& t : s.at("triggering_keywords")) {
                el.triggering_keywords.push_back(
                    {t.at("keyword").get<std::string>(), t.at("attack_vector").get<std::string>()});
            }
            surface.push_back(std::move(el));
        }
        return surface_render_spec(surface);
    }
    const auto& chains_json = report.at("chains");
    if (chains_json.is_null()) throw InvalidArgument("report has no exploit chains; analyze with --target first");
    ChainSet chains;
    chains.truncated = chains_json.value("truncated", false);
    for (const auto& item : chains_json.at("items")) {
        ExploitChain c;
        c.source = item.at("source").get<std::string>();
        c.target = item.at("target").get<std::string>();
        c.trivial = item.value("trivial", false);
        c.path.vertices = item.at("vertices").get<std::vector<std::string>>();
        c.path.edges = item.at("edges").get<std::vector<std::string>>();
        for (const auto& [ref_text, records] : item.at("evidence").items()) {
            const auto ref = parse_element_ref(ref_text);
            auto& list = c.evidence[ref];
            for (const auto& r : records) {
                list.push_back({ref, category_from_string(r.at("category").get<std::string>()),
                                r.at("keyword").get<std::string>(), r.at("attack_vector").get<std::string>()});
            }
        }
        chains.chains.push_back(std::move(c));
    }
    return chains_render_spec(chains, only_chain);
}

std::string render_graph(const SystemModel& model, const RenderSpec& spec) {
    for (const auto& ref : spec.highlight) {
        if (!model.contains(ref)) throw ValidationError("render spec highlights unknown element " + ref.str());
    }
    for (const auto& [ref, _] : spec.annotations) {
        if (!model.contains(ref)) throw ValidationError("render spec annotates unknown element " + ref.str());
    }

    std::string out = "digraph " + quote(model.graph_id) + " {\n";
    out += "  graph [rankdir=LR];\n";
    out += "  node [shape=box, style=rounded, fontname=\"Helvetica\"];\n";
    out += "  edge [fontname=\"Helvetica\", fontsize=10];\n";
    for (const auto& [id, asset] : model.assets) {
        const auto ref = ElementRef::asset(id);
        auto notes = spec.annotations.find(ref);
        out += "  " + quote(id) + " [label=" +
               label_for(model.display_name(ref), notes == spec.annotations.end() ? nullptr : &notes->second);
        if (spec.highlight.count(ref)) {
            out += spec.kind == RenderKind::Surface
                       ? ", style=\"rounded,filled\", fillcolor=\"#f8d7da\", color=\"#b02a37\", penwidth=2"
                       : ", style=\"rounded,bold\", color=\"#b02a37\", penwidth=2";
        }
        out += "];\n";
    }

    std::vector<const DependencyEdge*> edges;
    for (const auto& e : model.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* e : edges) {
        const auto ref = ElementRef::edge(e->id);
        auto notes = spec.annotations.find(ref);
        out += "  " + quote(e->source) + " -> " + quote(e->target) + " [id=" + quote(e->id);
        if (!e->label.empty() || notes != spec.annotations.end()) {
            out += ", label=" + label_for(e->label, notes == spec.annotations.end() ? nullptr : &notes->second);
        }
        if (!model.edge_directed(*e)) out += ", dir=none";
        if (spec.highlight.count(ref)) out += ", color=\"#b02a37\", penwidth=3";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace cybok
