#include "cybok/index.hpp"

#include <algorithm>

#include "cybok/error.hpp"
#include "cybok/text.hpp"

namespace cybok {

namespace {

constexpr std::string_view kMagic = "CYBOKIDX";

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_ += s;
    }
    void raw(std::string_view s) { out_ += s; }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::string str() {
        const auto n = u32();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw ParseError("truncated index file", pos_);
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::span<const Posting> SearchIndex::postings(std::string_view token) const {
    auto it = postings_.find(token);
    if (it == postings_.end()) return {};
    return it->second;
}

std::vector<std::string> SearchIndex::query(std::string_view keyword) const {
    return query_tokens(text::normalize(keyword));
}

std::vector<std::string> SearchIndex::query_tokens(const std::vector<std::string>& tokens) const {
    std::vector<std::string> result;
    if (tokens.empty()) return result;

    std::vector<std::span<const Posting>> lists;
    lists.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto p = postings(t);
        if (p.empty()) return result;
        lists.push_back(p);
    }

    auto find_doc = [](std::span<const Posting> list, std::uint32_t doc) -> const Posting* {
        auto it = std::lower_bound(list.begin(), list.end(), doc,
                                   [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        return it != list.end() && it->doc == doc ? &*it : nullptr;
    };

    for (const auto& first : lists.front()) {
        std::vector<const Posting*> per_token{&first};
        bool all_present = true;
        for (std::size_t k = 1; k < lists.size() && all_present; ++k) {
            const auto* p = find_doc(lists[k], first.doc);
            if (!p) all_present = false;
            else per_token.push_back(p);
        }
        if (!all_present) continue;

        const bool phrase = std::any_of(first.positions.begin(), first.positions.end(), [&](std::uint32_t start) {
            for (std::size_t k = 1; k < per_token.size(); ++k) {
                const auto& pos = per_token[k]->positions;
                if (!std::binary_search(pos.begin(), pos.end(), start + static_cast<std::uint32_t>(k))) {
                    return false;
                }
            }
            return true;
        });
        if (phrase) result.push_back(documents_[first.doc]);
    }
    return result;
}

std::string indexed_text(const AttackVectorEntry& entry) { return entry.name + " " + entry.description; }

SearchIndex build_index(const CorpusSnapshot& snapshot) {
    if (snapshot.entries.empty()) throw InvalidArgument("cannot index an empty snapshot");
    SearchIndex index;
    index.corpus_ref_ = snapshot.corpus_ref();
    index.documents_.reserve(snapshot.entries.size());
    for (const auto& [id, entry] : snapshot.entries) {
        const auto doc = static_cast<std::uint32_t>(index.documents_.size());
        index.documents_.push_back(id);
        const auto tokens = text::normalize(indexed_text(entry));
        for (std::uint32_t pos = 0; pos < tokens.size(); ++pos) {
            auto& list = index.postings_[tokens[pos]];
            if (list.empty() || list.back().doc != doc) list.push_back(Posting{doc, {}});
            list.back().positions.push_back(pos);
        }
    }
    return index;
}

std::string SearchIndex::serialize() const {
    Writer w;
    w.raw(kMagic);
    w.u32(kIndexFormatVersion);
    w.str(corpus_ref_);
    w.u32(static_cast<std::uint32_t>(documents_.size()));
    for (const auto& d : documents_) w.str(d);
    w.u32(static_cast<std::uint32_t>(postings_.size()));
    for (const auto& [token, list] : postings_) {
        w.str(token);
        w.u32(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.u32(p.doc);
            w.u32(static_cast<std::uint32_t>(p.positions.size()));
            for (auto pos : p.positions) w.u32(pos);
        }
    }
    return w.take();
}

SearchIndex SearchIndex::deserialize(std::string_view bytes) {
    Reader r(bytes);
    if (r.raw(kMagic.size()) != kMagic) throw ParseError("not a cybok index file", 0);
    const auto version = r.u32();
    if (version != kIndexFormatVersion) {
        throw ParseError("unsupported index format version " + std::to_string(version), kMagic.size());
    }
    SearchIndex index;
    index.corpus_ref_ = r.str();
    const auto ndocs = r.u32();
    for (std::uint32_t i = 0; i < ndocs; ++i) index.documents_.push_back(r.str());
    const auto ntokens = r.u32();
    for (std::uint32_t t = 0; t < ntokens; ++t) {
        auto token = r.str();
        std::vector<Posting> list(r.u32());
        for (auto& p : list) {
            p.doc = r.u32();
            if (p.doc >= ndocs) throw ParseError("index posting references unknown document", 0);
            p.positions.resize(r.u32());
            for (auto& pos : p.positions) pos = r.u32();
        }
        index.postings_.emplace(std::move(token), std::move(list));
    }
    if (!r.done()) throw ParseError("trailing bytes after index postings", bytes.size());
    return index;
}

void save_index(const SearchIndex& index, const std::filesystem::path& dir) {
    write_file(dir / kIndexFileName, index.serialize());
}

SearchIndex load_index(const std::filesystem::path& dir) {
    try {
        return SearchIndex::deserialize(read_file(dir / kIndexFileName));
    } catch (const ParseError& e) {
        throw PersistenceError("corrupt index in " + dir.string() + ": " + e.what());
    }
}

SearchIndex load_index(const std::filesystem::path& dir, const CorpusSnapshot& snapshot) {
    auto index = load_index(dir);
    if (index.corpus_ref() != snapshot.corpus_ref()) {
        throw StaleIndexError("index in " + dir.string() + " was built from corpus " + index.corpus_ref() +
                              " but the snapshot is " + snapshot.corpus_ref() +
                              "; rebuild it with `cybok index`");
    }
    return index;
}

}  // namespace cybok
