#include "cybok/service.hpp"

#include <random>

#include "cybok/error.hpp"

namespace cybok {

using nlohmann::json;

struct AnalysisService::Session {
    mutable std::shared_mutex mu;
    SystemModel model;
    std::uint64_t revision = 0;
    std::shared_ptr<const AnalysisResult> base;
    std::map<std::pair<std::string, std::size_t>, std::string> reports;  // (target, max_len) -> body
};

AnalysisService::AnalysisService(std::shared_ptr<const CorpusSnapshot> snapshot,
                                 std::shared_ptr<const SearchIndex> index)
    : snapshot_(std::move(snapshot)), index_(std::move(index)) {
    if (!snapshot_ || !index_) throw InvalidArgument("service needs a snapshot and an index");
    require_matching_index(*index_, *snapshot_);
    std::random_device rd;
    rng_state_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

AnalysisService::~AnalysisService() = default;

std::string AnalysisService::create_session(std::string_view graphml) {
    auto session = std::make_shared<Session>();
    session->model = load_graphml(graphml);

    std::string id;
    {
        std::lock_guard lock(rng_mu_);
        std::mt19937_64 gen(rng_state_);
        const auto a = gen();
        const auto b = gen();
        rng_state_ = gen();
        char buf[33];
        std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                      static_cast<unsigned long long>(b));
        id = buf;
    }
    std::unique_lock lock(sessions_mu_);
    sessions_.emplace(id, std::move(session));
    return id;
}

std::shared_ptr<AnalysisService::Session> AnalysisService::find(const std::string& session_id) const {
    std::shared_lock lock(sessions_mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw NotFoundError("unknown session '" + session_id + "'");
    return it->second;
}

AnalysisService::ModelView AnalysisService::model(const std::string& session_id) const {
    auto s = find(session_id);
    std::shared_lock lock(s->mu);
    return {s->model, s->revision};
}

namespace {

json descriptors_json(const DescriptorSet& d) {
    json out = json::object();
    for (auto c : kAllCategories) out[std::string(to_string(c))] = d.get(c);
    return out;
}

}  // namespace

json AnalysisService::model_json(const std::string& session_id) const {
    const auto view = model(session_id);
    json assets = json::array();
    for (const auto& [id, a] : view.model.assets) {
        assets.push_back({{"id", id}, {"label", a.label}, {"descriptors", descriptors_json(a.descriptors)}});
    }
    json edges = json::array();
    for (const auto& e : view.model.edges) {
        edges.push_back({{"id", e.id},
                         {"source", e.source},
                         {"target", e.target},
                         {"label", e.label},
                         {"directed", view.model.edge_directed(e)},
                         {"descriptors", descriptors_json(e.descriptors)}});
    }
    return json{{"session_id", session_id},
                {"revision", view.revision},
                {"directed", view.model.directed},
                {"assets", std::move(assets)},
                {"edges", std::move(edges)}};
}

std::uint64_t AnalysisService::edit_descriptor(const std::string& session_id, std::string_view element,
                                               std::string_view category, const std::vector<std::string>& keywords) {
    const auto cat = category_from_string(category);
    auto s = find(session_id);
    std::unique_lock lock(s->mu);
    const auto ref = s->model.resolve(element);
    s->model.descriptors(ref).set(cat, keywords);
    ++s->revision;
    s->base.reset();
    s->reports.clear();
    return s->revision;
}

std::shared_ptr<const AnalysisResult> AnalysisService::base_result(Session& session, SystemModel& model_out) {
    std::uint64_t revision = 0;
    {
        std::shared_lock lock(session.mu);
        model_out = session.model;
        revision = session.revision;
        if (session.base) return session.base;
    }
    // Computed without holding the session lock so readers are not blocked.
    auto result = std::make_shared<const AnalysisResult>(run_analysis(model_out, *snapshot_, *index_));
    computed_.fetch_add(1);
    std::unique_lock lock(session.mu);
    if (session.revision == revision && !session.base) session.base = result;
    return result;
}

std::string AnalysisService::analyze(const std::string& session_id, const AnalysisOptions& options) {
    auto s = find(session_id);
    const std::pair<std::string, std::size_t> key{options.target.value_or(""), options.target ? options.max_len : 0};
    {
        std::shared_lock lock(s->mu);
        if (auto it = s->reports.find(key); it != s->reports.end()) return it->second;
    }
    SystemModel model;
    std::uint64_t revision = 0;
    {
        std::shared_lock lock(s->mu);
        revision = s->revision;
    }
    auto base = base_result(*s, model);
    // base_result may have observed a newer revision than `revision`; the
    // model it copied is what the report describes.
    AnalysisResult result = *base;
    result.options = options;
    if (options.target) {
        result.chains = exploit_chains(model, result.evidence, result.surface, *options.target, options.max_len);
    }
    auto body = render_report(model, *snapshot_, result);

    std::unique_lock lock(s->mu);
    if (s->revision == revision && s->base == base) s->reports.emplace(key, body);
    return body;
}

json AnalysisService::surface(const std::string& session_id) {
    auto s = find(session_id);
    SystemModel model;
    auto base = base_result(*s, model);
    return surface_to_json(base->surface);
}

json AnalysisService::chains(const std::string& session_id, const std::string& target, std::size_t max_len) {
    auto s = find(session_id);
    SystemModel model;
    auto base = base_result(*s, model);
    const auto set = exploit_chains(model, base->evidence, base->surface, target, max_len);
    return chains_to_json(set, target, max_len);
}

std::string AnalysisService::export_graphml(const std::string& session_id) const {
    return save_graphml(model(session_id).model);
}

json AnalysisService::corpus_entry(std::string_view identifier) const {
    const auto* e = snapshot_->find(identifier);
    if (!e) throw NotFoundError("no corpus entry '" + std::string(identifier) + "'");
    return entry_to_json(*e);
}

std::size_t AnalysisService::session_count() const {
    std::shared_lock lock(sessions_mu_);
    return sessions_.size();
}

std::uint64_t AnalysisService::analyses_computed() const { return computed_.load(); }

}  // namespace cybok
