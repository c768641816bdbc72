#pragma once

// Text normalization shared by indexing and querying:
//   split into words -> compound expansion -> lowercase -> stop words -> stemming.

#include <string>
#include <string_view>
#include <vector>

namespace cybok::text {

// One pass of the original Porter suffix-stripping algorithm. Input must be
// lowercase ASCII letters; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

// porter_stem applied until the output stops changing, so every returned stem
// is a fixed point.
std::string stem(std::string_view word);

bool is_stop_word(std::string_view lowercase_word);
const std::vector<std::string_view>& stop_words();

// Splits one word (original case, may contain hyphens) into its compound
// parts: hyphen segments, then camelCase and letter/digit boundaries. Parts are
// lowercased. A word with no internal boundary yields a single part.
std::vector<std::string> compound_parts(std::string_view word);

// Full pipeline. Each word emits its joined lowercase form and, when it is a
// compound, each of its parts right after it. Never throws.
std::vector<std::string> normalize(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace cybok::text
