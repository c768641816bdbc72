#include <set>

#include "cybok/error.hpp"
#include "cybok/model.hpp"
#include "cybok/xml.hpp"

namespace cybok {

namespace {

constexpr std::string_view kGraphmlNs = "http://graphml.graphdrawing.org/xmlns";

enum class Domain { Node, Edge, Graph, All, Other };

Domain domain_of(std::string_view f) {
    if (f == "node") return Domain::Node;
    if (f == "edge") return Domain::Edge;
    if (f == "graph") return Domain::Graph;
    if (f == "all" || f.empty()) return Domain::All;
    return Domain::Other;
}

// What a <data key=".."> means for a node or edge.
struct KeyMeaning {
    enum class Kind { Category, Label, Opaque } kind = Kind::Opaque;
    Category category = Category::OperatingSystem;
    Domain domain = Domain::All;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool reserved_key_id(std::string_view id) {
    return id == "n_label" || id == "e_label" || (id.rfind("n_", 0) == 0 && try_category(id.substr(2))) ||
           (id.rfind("e_", 0) == 0 && try_category(id.substr(2)));
}

template <typename Element>
void read_data(const xml::Element& elem, const std::map<std::string, KeyMeaning>& keys, Domain domain,
               Element& target, std::string& label) {
    for (const auto* data : elem.children_named("data")) {
        const auto key = data->attribute("key").value_or("");
        auto it = keys.find(key);
        if (it == keys.end()) {
            throw ValidationError("<data> on line " + std::to_string(data->line) + " uses undeclared key '" +
                                  key + "'");
        }
        const auto& meaning = it->second;
        const bool applies = meaning.domain == Domain::All || meaning.domain == domain;
        if (applies && meaning.kind == KeyMeaning::Kind::Category) {
            for (auto& k : split_keywords(data->text())) target.descriptors.add(meaning.category, k);
        } else if (applies && meaning.kind == KeyMeaning::Kind::Label) {
            label = trim(data->text());
        } else if (meaning.kind == KeyMeaning::Kind::Opaque) {
            target.extra[key] = data->inner_xml();
        }
    }
}

}  // namespace

SystemModel load_graphml(std::string_view raw) {
    const auto doc = xml::parse(raw);
    const auto& root = *doc.root;
    if (root.local_name() != "graphml") {
        throw ParseError("not a GraphML document: root element is <" + root.name + ">", root.byte_offset,
                         root.line);
    }

    SystemModel model;
    std::map<std::string, KeyMeaning> keys;
    std::map<std::string, std::string> renamed;  // preserved key ids that clash with ours
    for (const auto* key : root.children_named("key")) {
        const auto id = key->attribute("id").value_or("");
        if (id.empty()) throw ValidationError("<key> on line " + std::to_string(key->line) + " has no id");
        KeyMeaning meaning;
        meaning.domain = domain_of(key->attribute("for").value_or(""));
        const auto name = key->attribute("attr.name").value_or("");
        const bool element_domain =
            meaning.domain == Domain::Node || meaning.domain == Domain::Edge || meaning.domain == Domain::All;
        if (auto c = try_category(name); c && element_domain) {
            meaning.kind = KeyMeaning::Kind::Category;
            meaning.category = *c;
        } else if (name == "label" && element_domain) {
            meaning.kind = KeyMeaning::Kind::Label;
        } else {
            KeyDeclaration decl{key->attributes, key->inner_xml()};
            if (reserved_key_id(id)) {
                auto fresh = id + "_x";
                decl.attributes["id"] = fresh;
                renamed[id] = fresh;
            }
            model.extra_keys.push_back(std::move(decl));
        }
        keys[id] = meaning;
    }

    const auto* graph = root.child("graph");
    if (!graph) throw ValidationError("GraphML document has no <graph>");
    model.graph_id = graph->attribute("id").value_or("G");
    model.directed = graph->attribute("edgedefault").value_or("directed") != "undirected";
    for (const auto* data : graph->children_named("data")) {
        const auto key = data->attribute("key").value_or("");
        auto it = keys.find(key);
        if (it != keys.end() && it->second.kind == KeyMeaning::Kind::Opaque) {
            model.graph_extra[key] = data->inner_xml();
        }
    }

    auto rename = [&renamed](OpaqueData& extra) {
        for (const auto& [from, to] : renamed) {
            if (auto node = extra.extract(from)) {
                node.key() = to;
                extra.insert(std::move(node));
            }
        }
    };
    rename(model.graph_extra);

    for (const auto* node : graph->children_named("node")) {
        Asset asset;
        asset.id = node->attribute("id").value_or("");
        if (asset.id.empty()) {
            throw ValidationError("node on line " + std::to_string(node->line) + " has an empty id");
        }
        read_data(*node, keys, Domain::Node, asset, asset.label);
        rename(asset.extra);
        const auto id = asset.id;
        if (!model.assets.emplace(id, std::move(asset)).second) {
            throw ValidationError("duplicate node id '" + id + "'");
        }
    }

    std::set<std::string> edge_ids;
    std::vector<std::size_t> unnamed;
    for (const auto* e : graph->children_named("edge")) {
        DependencyEdge edge;
        edge.id = e->attribute("id").value_or("");
        edge.source = e->attribute("source").value_or("");
        edge.target = e->attribute("target").value_or("");
        if (auto d = e->attribute("directed")) edge.directed = (*d == "true");
        read_data(*e, keys, Domain::Edge, edge, edge.label);
        rename(edge.extra);
        if (edge.id.empty()) {
            unnamed.push_back(model.edges.size());
        } else if (!edge_ids.insert(edge.id).second) {
            throw ValidationError("duplicate edge id '" + edge.id + "'");
        }
        model.edges.push_back(std::move(edge));
    }
    std::size_t counter = 0;
    for (auto i : unnamed) {
        std::string id;
        do {
            id = "e" + std::to_string(counter++);
        } while (edge_ids.count(id));
        edge_ids.insert(id);
        model.edges[i].id = id;
    }

    model.validate();
    return model;
}

namespace {

void write_data(std::string& out, std::string_view prefix, const std::string& label, const DescriptorSet& d,
                const OpaqueData& extra) {
    if (!label.empty()) {
        out += "      <data key=\"";
        out += prefix;
        out += "label\">" + xml::escape(label) + "</data>\n";
    }
    for (auto c : kAllCategories) {
        const auto& list = d.get(c);
        if (list.empty()) continue;
        out += "      <data key=\"";
        out += prefix;
        out += to_string(c);
        out += "\">" + xml::escape(join_keywords(list)) + "</data>\n";
    }
    for (const auto& [key, inner] : extra) {
        out += "      <data key=\"" + xml::escape_attribute(key) + "\">" + inner + "</data>\n";
    }
}

}  // namespace

std::string save_graphml(const SystemModel& model) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<graphml xmlns=\"" + std::string(kGraphmlNs) + "\">\n";
    for (const char* domain : {"node", "edge"}) {
        const std::string prefix = std::string(1, domain[0]) + "_";
        out += "  <key id=\"" + prefix + "label\" for=\"" + domain +
               "\" attr.name=\"label\" attr.type=\"string\"/>\n";
        for (auto c : kAllCategories) {
            out += "  <key id=\"" + prefix + std::string(to_string(c)) + "\" for=\"" + domain + "\" attr.name=\"" +
                   std::string(to_string(c)) + "\" attr.type=\"string\"/>\n";
        }
    }
    for (const auto& key : model.extra_keys) {
        out += "  <key";
        for (const auto& [k, v] : key.attributes) out += " " + k + "=\"" + xml::escape_attribute(v) + "\"";
        out += key.inner_xml.empty() ? "/>\n" : ">" + key.inner_xml + "</key>\n";
    }
    out += "  <graph id=\"" + xml::escape_attribute(model.graph_id) + "\" edgedefault=\"" +
           (model.directed ? "directed" : "undirected") + "\">\n";
    for (const auto& [key, inner] : model.graph_extra) {
        out += "    <data key=\"" + xml::escape_attribute(key) + "\">" + inner + "</data>\n";
    }
    for (const auto& [id, asset] : model.assets) {
        out += "    <node id=\"" + xml::escape_attribute(id) + "\">\n";
        write_data(out, "n_", asset.label, asset.descriptors, asset.extra);
        out += "    </node>\n";
    }
    for (const auto& e : model.edges) {
        out += "    <edge id=\"" + xml::escape_attribute(e.id) + "\" source=\"" + xml::escape_attribute(e.source) +
               "\" target=\"" + xml::escape_attribute(e.target) + "\"";
        if (e.directed) out += std::string(" directed=\"") + (*e.directed ? "true" : "false") + "\"";
        out += ">\n";
        write_data(out, "e_", e.label, e.descriptors, e.extra);
        out += "    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

}  // namespace cybok
