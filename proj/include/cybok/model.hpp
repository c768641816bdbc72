#pragma once

// Design-phase system model: a directed (or undirected) multigraph of assets
// and dependency edges, each annotated with the seven-category descriptor
// schema.

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cybok {

enum class Category {
    OperatingSystem,
    DeviceName,
    Communication,
    Hardware,
    Firmware,
    Software,
    EntryPoints,
};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::OperatingSystem, Category::DeviceName, Category::Communication, Category::Hardware,
    Category::Firmware,        Category::Software,   Category::EntryPoints,
};

// "operating_system", "device_name", ... as used in GraphML keys and the API.
std::string_view to_string(Category c);
// Throws InvalidArgument for anything outside the seven categories.
Category category_from_string(std::string_view name);
std::optional<Category> try_category(std::string_view name);

class DescriptorSet {
public:
    const std::vector<std::string>& get(Category c) const { return lists_[index(c)]; }
    const std::vector<std::string>& entry_points() const { return get(Category::EntryPoints); }

    // Trims each keyword, drops empty ones and collapses duplicates, keeping
    // first-occurrence order.
    void set(Category c, const std::vector<std::string>& keywords);
    void add(Category c, std::string_view keyword);

    bool empty() const;
    std::size_t size() const;

    bool operator==(const DescriptorSet&) const = default;

private:
    static std::size_t index(Category c) { return static_cast<std::size_t>(c); }
    std::array<std::vector<std::string>, 7> lists_;
};

struct ElementRef {
    enum class Kind { Asset, Edge };
    Kind kind = Kind::Asset;
    std::string id;

    static ElementRef asset(std::string id) { return {Kind::Asset, std::move(id)}; }
    static ElementRef edge(std::string id) { return {Kind::Edge, std::move(id)}; }

    bool is_asset() const { return kind == Kind::Asset; }
    // "asset:<id>" / "edge:<id>"
    std::string str() const;

    auto operator<=>(const ElementRef&) const = default;
};

std::string_view to_string(ElementRef::Kind kind);

// GraphML data carried through untouched: key id -> inner XML.
using OpaqueData = std::map<std::string, std::string>;

struct Asset {
    std::string id;
    std::string label;
    DescriptorSet descriptors;
    OpaqueData extra;

    bool operator==(const Asset&) const = default;
};

struct DependencyEdge {
    std::string id;
    std::string source;
    std::string target;
    std::string label;
    DescriptorSet descriptors;
    // Per-edge override of SystemModel::directed.
    std::optional<bool> directed;
    OpaqueData extra;

    bool operator==(const DependencyEdge&) const = default;
};

// A GraphML <key> declaration outside the descriptor profile.
struct KeyDeclaration {
    std::map<std::string, std::string> attributes;  // id, for, attr.name, attr.type, ...
    std::string inner_xml;                          // e.g. <default>

    bool operator==(const KeyDeclaration&) const = default;
};

struct SystemModel {
    std::map<std::string, Asset> assets;
    std::vector<DependencyEdge> edges;
    bool directed = true;
    std::string graph_id = "G";
    std::vector<KeyDeclaration> extra_keys;
    OpaqueData graph_extra;

    const Asset* find_asset(std::string_view id) const;
    const DependencyEdge* find_edge(std::string_view id) const;
    bool contains(const ElementRef& ref) const;
    const DescriptorSet& descriptors(const ElementRef& ref) const;
    DescriptorSet& descriptors(const ElementRef& ref);
    // Label, falling back to the id.
    std::string display_name(const ElementRef& ref) const;
    bool edge_directed(const DependencyEdge& e) const { return e.directed.value_or(directed); }

    // Resolves "asset:<id>", "edge:<id>" or a bare id (asset first). Throws
    // NotFoundError when nothing matches.
    ElementRef resolve(std::string_view ref) const;

    // Throws ValidationError naming the first offending element: empty or
    // duplicate asset id, duplicate edge id, dangling edge endpoint.
    void validate() const;

    bool operator==(const SystemModel&) const = default;
};

struct DescriptorRef {
    ElementRef element;
    Category category = Category::OperatingSystem;
    std::string keyword;

    bool operator==(const DescriptorRef&) const = default;
};

// Assets by id, then edges by id; categories in schema order; keywords in
// stored order.
std::vector<DescriptorRef> all_descriptors(const SystemModel& model);

// GraphML reader/writer for the descriptor profile (see docs/graphml-profile.md).
SystemModel load_graphml(std::string_view raw);
std::string save_graphml(const SystemModel& model);

// Semicolon-delimited keyword lists with backslash escapes.
std::vector<std::string> split_keywords(std::string_view value);
std::string join_keywords(const std::vector<std::string>& keywords);

}  // namespace cybok
