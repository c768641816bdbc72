#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cybok/corpus.hpp"

namespace cybok {

struct Posting {
    std::uint32_t doc = 0;                  // index into SearchIndex::documents()
    std::vector<std::uint32_t> positions;   // strictly increasing

    bool operator==(const Posting&) const = default;
};

// Inverted index over normalize(name + " " + description) of every entry.
// Immutable once built; all member functions are safe to call concurrently.
class SearchIndex {
public:
    SearchIndex() = default;

    std::size_t doc_count() const noexcept { return documents_.size(); }
    const std::string& corpus_ref() const noexcept { return corpus_ref_; }
    // Indexed identifiers in lexicographic order.
    const std::vector<std::string>& documents() const noexcept { return documents_; }
    // Empty span when the token is not indexed.
    std::span<const Posting> postings(std::string_view token) const;
    std::size_t token_count() const noexcept { return postings_.size(); }

    // Identifiers whose token stream contains normalize(keyword) as a
    // contiguous phrase, sorted lexicographically. Empty keyword -> empty.
    std::vector<std::string> query(std::string_view keyword) const;
    std::vector<std::string> query_tokens(const std::vector<std::string>& tokens) const;

    std::string serialize() const;
    static SearchIndex deserialize(std::string_view bytes);

    bool operator==(const SearchIndex&) const = default;

private:
    friend SearchIndex build_index(const CorpusSnapshot& snapshot);

    std::string corpus_ref_;
    std::vector<std::string> documents_;
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
};

// The text that gets indexed for an entry.
std::string indexed_text(const AttackVectorEntry& entry);

// Throws InvalidArgument on an empty snapshot.
SearchIndex build_index(const CorpusSnapshot& snapshot);

inline constexpr const char* kIndexFileName = "index.bin";
inline constexpr std::uint32_t kIndexFormatVersion = 1;

void save_index(const SearchIndex& index, const std::filesystem::path& dir);
SearchIndex load_index(const std::filesystem::path& dir);
// Also verifies the index was built from `snapshot`; throws StaleIndexError otherwise.
SearchIndex load_index(const std::filesystem::path& dir, const CorpusSnapshot& snapshot);

}  // namespace cybok
