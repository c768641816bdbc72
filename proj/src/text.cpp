#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "cybok/text.hpp"

namespace cybok::text {

namespace {

// Fixed English stop-word list; changing it changes every persisted index.
constexpr std::string_view kStopWords[] = {
    "a",       "about",    "above",     "after",      "again",   "against", "all",    "an",
    "and",     "any",      "are",       "as",         "at",      "be",      "because", "been",
    "before",  "being",    "below",     "between",    "both",    "but",     "by",     "could",
    "did",     "do",       "does",      "doing",      "down",    "during",  "each",   "either",
    "else",    "etc",      "ever",      "few",        "for",     "from",    "further", "had",
    "has",     "have",     "having",    "he",         "her",     "here",    "hers",   "herself",
    "him",     "himself",  "his",       "how",        "however", "i",       "if",     "in",
    "into",    "is",       "it",        "its",        "itself",  "just",    "may",    "me",
    "might",   "more",     "most",      "must",       "my",      "myself",  "neither", "no",
    "nor",     "not",      "of",        "off",        "on",      "once",    "only",   "or",
    "other",   "others",   "our",       "ours",       "ourselves", "out",   "over",   "own",
    "same",    "she",      "should",    "so",         "some",    "such",    "than",   "that",
    "the",     "their",    "theirs",    "them",       "themselves", "then", "there",  "these",
    "they",    "this",     "those",     "through",    "thus",    "to",      "too",    "under",
    "until",   "upon",     "very",      "was",        "we",      "were",    "what",   "when",
    "where",   "whether",  "which",     "while",      "who",     "whom",    "why",    "will",
    "with",    "within",   "would",     "yet",        "you",     "your",    "yours",  "s",
    "t",
};

const std::unordered_set<std::string_view>& stop_set() {
    static const std::unordered_set<std::string_view> set(std::begin(kStopWords), std::end(kStopWords));
    return set;
}

enum class CharClass { Upper, Lower, Digit, OtherLetter, Hyphen, Separator };

struct CodePoint {
    char32_t value;
    std::size_t offset;
    std::size_t length;
};

// Lenient UTF-8 decoder: invalid bytes decode as U+FFFD, one byte at a time.
std::vector<CodePoint> decode(std::string_view s) {
    std::vector<CodePoint> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        char32_t cp = 0xFFFD;
        if (b < 0x80) {
            cp = b;
        } else if ((b >> 5) == 0x6) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b >> 4) == 0xE) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b >> 3) == 0x1E) {
            len = 4;
            cp = b & 0x07;
        } else {
            out.push_back({0xFFFD, i, 1});
            ++i;
            continue;
        }
        bool ok = i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto c = static_cast<unsigned char>(s[i + k]);
            if ((c >> 6) != 0x2) ok = false;
            else cp = (cp << 6) | (c & 0x3F);
        }
        if (!ok) {
            out.push_back({0xFFFD, i, 1});
            ++i;
            continue;
        }
        out.push_back({cp, i, len});
        i += len;
    }
    return out;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

bool is_upper_nonascii(char32_t cp) {
    return (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) ||  // Latin-1
           (cp >= 0x391 && cp <= 0x3A9) ||              // Greek
           (cp >= 0x400 && cp <= 0x42F);                // Cyrillic
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x391 && cp <= 0x3A9) return cp + 0x20;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
    return cp;
}

CharClass classify(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return CharClass::Upper;
    if (cp >= 'a' && cp <= 'z') return CharClass::Lower;
    if (cp >= '0' && cp <= '9') return CharClass::Digit;
    if (cp == '-' || cp == 0x2010 || cp == 0x2011) return CharClass::Hyphen;
    if (cp < 0x80) return CharClass::Separator;
    // Latin-1 punctuation/symbols, general punctuation, replacement char.
    if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return CharClass::Separator;
    if ((cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) || cp == 0xFFFD ||
        (cp >= 0xFE00 && cp <= 0xFE0F) || cp == 0xFEFF) {
        return CharClass::Separator;
    }
    return is_upper_nonascii(cp) ? CharClass::Upper : CharClass::OtherLetter;
}

bool is_letter(CharClass c) {
    return c == CharClass::Upper || c == CharClass::Lower || c == CharClass::OtherLetter;
}

bool is_word_char(CharClass c) { return is_letter(c) || c == CharClass::Digit; }

std::string lower_utf8(const std::vector<CodePoint>& cps, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) encode(to_lower(cps[i].value), out);
    return out;
}

// camelCase and letter/digit boundaries inside one hyphen-free segment.
void split_segment(const std::vector<CodePoint>& cps, std::size_t begin, std::size_t end,
                   std::vector<std::string>& parts) {
    std::size_t start = begin;
    for (std::size_t i = begin + 1; i < end; ++i) {
        const auto prev = classify(cps[i - 1].value);
        const auto cur = classify(cps[i].value);
        bool boundary = false;
        if ((prev == CharClass::Digit) != (cur == CharClass::Digit)) {
            boundary = true;
        } else if (prev != CharClass::Upper && prev != CharClass::Digit && cur == CharClass::Upper) {
            boundary = true;  // aB
        } else if (prev == CharClass::Upper && cur == CharClass::Upper && i + 1 < end &&
                   classify(cps[i + 1].value) == CharClass::Lower) {
            boundary = true;  // ABc -> A|Bc
        }
        if (boundary) {
            parts.push_back(lower_utf8(cps, start, i));
            start = i;
        }
    }
    parts.push_back(lower_utf8(cps, start, end));
}

struct Word {
    std::size_t begin;
    std::size_t end;
};

// Maximal runs of word characters joined by single interior hyphens.
std::vector<Word> split_words(const std::vector<CodePoint>& cps) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (!is_word_char(classify(cps[i].value))) {
            ++i;
            continue;
        }
        const std::size_t begin = i;
        while (i < cps.size()) {
            const auto c = classify(cps[i].value);
            if (is_word_char(c)) {
                ++i;
            } else if (c == CharClass::Hyphen && i + 1 < cps.size() &&
                       is_word_char(classify(cps[i + 1].value))) {
                ++i;
            } else {
                break;
            }
        }
        words.push_back({begin, i});
    }
    return words;
}

std::vector<std::string> parts_of(const std::vector<CodePoint>& cps, Word w) {
    std::vector<std::string> parts;
    std::size_t seg = w.begin;
    for (std::size_t i = w.begin; i <= w.end; ++i) {
        if (i == w.end || classify(cps[i].value) == CharClass::Hyphen) {
            if (i > seg) split_segment(cps, seg, i, parts);
            seg = i + 1;
        }
    }
    return parts;
}

bool ascii_lower_alpha(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

void emit(std::string token, std::vector<std::string>& out) {
    if (token.empty() || is_stop_word(token)) return;
    if (ascii_lower_alpha(token)) {
        token = stem(token);
        if (is_stop_word(token)) return;
    }
    out.push_back(std::move(token));
}

}  // namespace

bool is_stop_word(std::string_view lowercase_word) { return stop_set().count(lowercase_word) > 0; }

const std::vector<std::string_view>& stop_words() {
    static const std::vector<std::string_view> list(std::begin(kStopWords), std::end(kStopWords));
    return list;
}

std::vector<std::string> compound_parts(std::string_view word) {
    const auto cps = decode(word);
    std::vector<std::string> parts;
    for (const auto& w : split_words(cps)) {
        auto p = parts_of(cps, w);
        parts.insert(parts.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    return parts;
}

std::vector<std::string> normalize(std::string_view text) {
    const auto cps = decode(text);
    std::vector<std::string> tokens;
    for (const auto& w : split_words(cps)) {
        auto parts = parts_of(cps, w);
        std::string whole;
        for (const auto& p : parts) whole += p;
        emit(std::move(whole), tokens);
        if (parts.size() > 1) {
            for (auto& p : parts) emit(std::move(p), tokens);
        }
    }
    return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

}  // namespace cybok::text
