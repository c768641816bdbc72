#include "cybok/model.hpp"

#include <algorithm>
#include <set>

#include "cybok/error.hpp"

namespace cybok {

namespace {

constexpr std::array<std::string_view, 7> kCategoryNames = {
    "operating_system", "device_name", "communication", "hardware",
    "firmware",         "software",    "entry_points",
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> try_category(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == name) return kAllCategories[i];
    }
    return std::nullopt;
}

Category category_from_string(std::string_view name) {
    if (auto c = try_category(name)) return *c;
    throw InvalidArgument("unknown descriptor category '" + std::string(name) + "'");
}

void DescriptorSet::set(Category c, const std::vector<std::string>& keywords) {
    auto& list = lists_[index(c)];
    list.clear();
    for (const auto& k : keywords) add(c, k);
}

void DescriptorSet::add(Category c, std::string_view keyword) {
    auto& list = lists_[index(c)];
    auto k = trim(keyword);
    if (k.empty() || std::find(list.begin(), list.end(), k) != list.end()) return;
    list.push_back(std::move(k));
}

bool DescriptorSet::empty() const {
    return std::all_of(lists_.begin(), lists_.end(), [](const auto& l) { return l.empty(); });
}

std::size_t DescriptorSet::size() const {
    std::size_t n = 0;
    for (const auto& l : lists_) n += l.size();
    return n;
}

std::string_view to_string(ElementRef::Kind kind) {
    return kind == ElementRef::Kind::Asset ? "asset" : "edge";
}

std::string ElementRef::str() const { return std::string(to_string(kind)) + ":" + id; }

const Asset* SystemModel::find_asset(std::string_view id) const {
    auto it = assets.find(std::string(id));
    return it == assets.end() ? nullptr : &it->second;
}

const DependencyEdge* SystemModel::find_edge(std::string_view id) const {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const DependencyEdge& e) { return e.id == id; });
    return it == edges.end() ? nullptr : &*it;
}

bool SystemModel::contains(const ElementRef& ref) const {
    return ref.is_asset() ? find_asset(ref.id) != nullptr : find_edge(ref.id) != nullptr;
}

const DescriptorSet& SystemModel::descriptors(const ElementRef& ref) const {
    if (ref.is_asset()) {
        if (const auto* a = find_asset(ref.id)) return a->descriptors;
    } else if (const auto* e = find_edge(ref.id)) {
        return e->descriptors;
    }
    throw NotFoundError("no such element " + ref.str());
}

DescriptorSet& SystemModel::descriptors(const ElementRef& ref) {
    return const_cast<DescriptorSet&>(std::as_const(*this).descriptors(ref));
}

std::string SystemModel::display_name(const ElementRef& ref) const {
    if (ref.is_asset()) {
        if (const auto* a = find_asset(ref.id); a && !a->label.empty()) return a->label;
    } else if (const auto* e = find_edge(ref.id); e && !e->label.empty()) {
        return e->label;
    }
    return ref.id;
}

ElementRef SystemModel::resolve(std::string_view ref) const {
    auto try_ref = [this](ElementRef r) -> std::optional<ElementRef> {
        if (contains(r)) return r;
        return std::nullopt;
    };
    if (ref.rfind("asset:", 0) == 0) {
        if (auto r = try_ref(ElementRef::asset(std::string(ref.substr(6))))) return *r;
    } else if (ref.rfind("edge:", 0) == 0) {
        if (auto r = try_ref(ElementRef::edge(std::string(ref.substr(5))))) return *r;
    } else {
        if (auto r = try_ref(ElementRef::asset(std::string(ref)))) return *r;
        if (auto r = try_ref(ElementRef::edge(std::string(ref)))) return *r;
    }
    throw NotFoundError("no such element '" + std::string(ref) + "'");
}

void SystemModel::validate() const {
    for (const auto& [key, asset] : assets) {
        if (asset.id.empty()) throw ValidationError("asset with empty id");
        if (key != asset.id) throw ValidationError("asset '" + asset.id + "' stored under key '" + key + "'");
    }
    std::set<std::string> edge_ids;
    for (const auto& e : edges) {
        if (e.id.empty()) throw ValidationError("edge with empty id");
        if (!edge_ids.insert(e.id).second) throw ValidationError("duplicate edge id '" + e.id + "'");
        if (!find_asset(e.source)) {
            throw ValidationError("edge '" + e.id + "' references unknown node '" + e.source + "'");
        }
        if (!find_asset(e.target)) {
            throw ValidationError("edge '" + e.id + "' references unknown node '" + e.target + "'");
        }
    }
}

std::vector<DescriptorRef> all_descriptors(const SystemModel& model) {
    std::vector<DescriptorRef> out;
    auto add = [&out](const ElementRef& ref, const DescriptorSet& d) {
        for (auto c : kAllCategories) {
            for (const auto& k : d.get(c)) out.push_back({ref, c, k});
        }
    };
    for (const auto& [id, asset] : model.assets) add(ElementRef::asset(id), asset.descriptors);

    std::vector<const DependencyEdge*> edges;
    for (const auto& e : model.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* e : edges) add(ElementRef::edge(e->id), e->descriptors);
    return out;
}

std::vector<std::string> split_keywords(std::string_view value) {
    std::vector<std::string> out;
    std::string current;
    bool escaped = false;
    auto flush = [&] {
        auto k = trim(current);
        if (!k.empty()) out.push_back(std::move(k));
        current.clear();
    };
    for (char c : value) {
        if (escaped) {
            current += c;
            escaped = false;
        } else if (c == '\\') {
            escaped = true;
        } else if (c == ';') {
            flush();
        } else {
            current += c;
        }
    }
    if (escaped) current += '\\';
    flush();
    return out;
}

std::string join_keywords(const std::vector<std::string>& keywords) {
    std::string out;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        if (i) out += ';';
        for (char c : keywords[i]) {
            if (c == '\\' || c == ';') out += '\\';
            out += c;
        }
    }
    return out;
}

}  // namespace cybok
