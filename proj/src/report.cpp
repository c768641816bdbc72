#include "cybok/report.hpp"

#include <algorithm>

#include "cybok/error.hpp"

namespace cybok {

using nlohmann::json;

AnalysisResult run_analysis(const SystemModel& model, const CorpusSnapshot& snapshot, const SearchIndex& index,
                            const AnalysisOptions& options) {
    require_matching_index(index, snapshot);
    AnalysisResult result;
    result.options = options;
    result.evidence = associate(model, index);
    result.surface = attack_surface(model, result.evidence);
    if (options.target) {
        result.chains = exploit_chains(model, result.evidence, result.surface, *options.target, options.max_len);
    }
    result.rollup = rollup(result.evidence, snapshot);
    return result;
}

std::string short_description(const AttackVectorEntry& entry) {
    if (!entry.name.empty()) return entry.name;
    const auto& d = entry.description;
    auto end = d.find(". ");
    std::string first = end == std::string::npos ? d : d.substr(0, end + 1);
    constexpr std::size_t kMax = 160;
    if (first.size() > kMax) {
        first.resize(kMax);
        // Do not cut a UTF-8 sequence in half.
        while (!first.empty() && (static_cast<unsigned char>(first.back()) & 0xC0) == 0x80) first.pop_back();
        if (!first.empty() && static_cast<unsigned char>(first.back()) >= 0xC0) first.pop_back();
        first += "...";
    }
    return first;
}

std::vector<TableRow> results_table(const SystemModel& model, const std::vector<EvidenceRecord>& evidence,
                                    const AbstractionRollup& rollup, const CorpusSnapshot& snapshot) {
    std::map<ElementRef, std::set<std::string>> direct;
    for (const auto& r : evidence) direct[r.element].insert(r.attack_vector);
    std::map<ElementRef, std::set<std::string>> derived;
    for (const auto& [ref, roll] : rollup.per_element) {
        for (const auto* set : {&roll.derived_cwes, &roll.derived_capecs}) {
            for (const auto& id : *set) {
                if (!direct[ref].count(id)) derived[ref].insert(id);
            }
        }
    }

    std::set<ElementRef> elements;
    for (const auto& [ref, _] : direct) elements.insert(ref);
    for (const auto& [ref, _] : derived) elements.insert(ref);

    auto describe = [&snapshot](const std::string& id) {
        const auto* e = snapshot.find(id);
        return e ? short_description(*e) : std::string{};
    };

    std::vector<TableRow> rows;
    for (const auto& ref : elements) {
        const auto name = model.contains(ref) ? model.display_name(ref) : ref.id;
        for (const auto& id : direct[ref]) rows.push_back({ref, name, id, describe(id), false});
        for (const auto& id : derived[ref]) rows.push_back({ref, name, id, describe(id), true});
    }
    return rows;
}

std::string emit_results_table(const std::vector<TableRow>& rows) {
    const std::string h1 = "Model Element", h2 = "Attack Vector", h3 = "Description";
    std::size_t w1 = h1.size(), w2 = h2.size();
    for (const auto& r : rows) {
        w1 = std::max(w1, r.element_name.size());
        w2 = std::max(w2, r.attack_vector.size() + (r.derived ? 1 : 0));
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out = pad(h1, w1) + "  " + pad(h2, w2) + "  " + h3 + "\n";
    out += std::string(w1, '-') + "  " + std::string(w2, '-') + "  " + std::string(h3.size(), '-') + "\n";
    const ElementRef* previous = nullptr;
    for (const auto& r : rows) {
        const bool same = previous && *previous == r.element;
        out += pad(same ? std::string{} : r.element_name, w1) + "  " +
               pad(r.attack_vector + (r.derived ? "*" : ""), w2) + "  " + r.description + "\n";
        previous = &r.element;
    }
    if (std::any_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.derived; })) {
        out += "\n* derived through CVE/CWE cross-references\n";
    }
    return out;
}

ElementRef parse_element_ref(std::string_view text) {
    if (text.rfind("asset:", 0) == 0) return ElementRef::asset(std::string(text.substr(6)));
    if (text.rfind("edge:", 0) == 0) return ElementRef::edge(std::string(text.substr(5)));
    throw InvalidArgument("malformed element reference '" + std::string(text) + "'");
}

json evidence_to_json(const EvidenceRecord& r) {
    return json{{"element", r.element.str()},
                {"category", to_string(r.category)},
                {"keyword", r.keyword},
                {"attack_vector", r.attack_vector}};
}

json surface_to_json(const std::vector<AttackSurfaceElement>& surface) {
    json out = json::array();
    for (const auto& s : surface) {
        json triggers = json::array();
        for (const auto& t : s.triggering_keywords) {
            triggers.push_back({{"keyword", t.keyword}, {"attack_vector", t.attack_vector}});
        }
        out.push_back({{"asset", s.asset}, {"triggering_keywords", std::move(triggers)}});
    }
    return out;
}

json chains_to_json(const ChainSet& chains, const std::string& target, std::size_t max_len) {
    json items = json::array();
    for (const auto& c : chains.chains) {
        json evidence = json::object();
        for (const auto& [ref, records] : c.evidence) {
            json list = json::array();
            for (const auto& r : records) {
                list.push_back({{"category", to_string(r.category)},
                                {"keyword", r.keyword},
                                {"attack_vector", r.attack_vector}});
            }
            evidence[ref.str()] = std::move(list);
        }
        items.push_back({{"source", c.source},
                         {"target", c.target},
                         {"trivial", c.trivial},
                         {"vertices", c.path.vertices},
                         {"edges", c.path.edges},
                         {"evidence", std::move(evidence)}});
    }
    return json{{"target", target}, {"max_len", max_len}, {"truncated", chains.truncated}, {"items", std::move(items)}};
}

json entry_to_json(const AttackVectorEntry& entry) {
    return json{{"db", to_string(entry.database)},
                {"id", entry.identifier},
                {"name", entry.name},
                {"description", entry.description},
                {"related_attack_patterns", entry.related_attack_patterns},
                {"related_weaknesses", entry.related_weaknesses},
                {"related_vulnerabilities", entry.related_vulnerabilities}};
}

json report_to_json(const SystemModel& model, const CorpusSnapshot& snapshot, const AnalysisResult& result) {
    json report;
    report["format"] = "cybok-report";
    report["format_version"] = kReportFormatVersion;
    report["corpus_ref"] = snapshot.corpus_ref();
    report["model"] = {{"assets", model.assets.size()}, {"edges", model.edges.size()}, {"directed", model.directed}};

    json evidence = json::array();
    for (const auto& r : result.evidence) evidence.push_back(evidence_to_json(r));
    report["evidence"] = std::move(evidence);
    report["surface"] = surface_to_json(result.surface);
    report["chains"] = result.chains ? chains_to_json(*result.chains, *result.options.target, result.options.max_len)
                                     : json(nullptr);

    json roll = json::object();
    for (const auto& [ref, r] : result.rollup.per_element) {
        roll[ref.str()] = {{"cves", r.cves},
                           {"derived_cwes", r.derived_cwes},
                           {"derived_capecs", r.derived_capecs},
                           {"direct_cwes", r.direct_cwes},
                           {"direct_capecs", r.direct_capecs}};
    }
    report["rollup"] = std::move(roll);

    json table = json::array();
    for (const auto& row : results_table(model, result.evidence, result.rollup, snapshot)) {
        table.push_back({{"element", row.element.str()},
                         {"element_name", row.element_name},
                         {"attack_vector", row.attack_vector},
                         {"description", row.description},
                         {"derived", row.derived}});
    }
    report["table"] = std::move(table);
    return report;
}

std::string render_report(const SystemModel& model, const CorpusSnapshot& snapshot, const AnalysisResult& result) {
    return report_to_json(model, snapshot, result).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace cybok
