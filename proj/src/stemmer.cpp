#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "cybok/text.hpp"

namespace cybok::text {

namespace {

class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view word) : w_(word) {}

    std::string run() {
        if (w_.size() <= 2) return w_;
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return w_;
    }

private:
    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    bool consonant(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 || !consonant(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in w_[0, len).
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && consonant(i)) ++i;
        while (i < len) {
            while (i < len && !consonant(i)) ++i;
            if (i >= len) break;
            while (i < len && consonant(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!consonant(i)) return true;
        }
        return false;
    }

    bool double_consonant(std::size_t len) const {
        return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
    }

    // consonant-vowel-consonant ending, last consonant not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3) return false;
        if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
        const char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends_with(std::string_view suffix) const {
        return w_.size() >= suffix.size() &&
               std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
    }

    std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

    void replace(std::string_view suffix, std::string_view replacement) {
        w_.resize(stem_len(suffix));
        w_ += replacement;
    }

    // Longest matching suffix wins; when its condition fails no shorter rule is tried.
    template <std::size_t N, typename Cond>
    void apply_longest(const std::array<Rule, N>& rules, Cond cond) {
        const Rule* best = nullptr;
        for (const auto& r : rules) {
            if (ends_with(r.suffix) && (!best || r.suffix.size() > best->suffix.size())) best = &r;
        }
        if (best && cond(*best, stem_len(best->suffix))) replace(best->suffix, best->replacement);
    }

    void step1a() {
        if (ends_with("sses")) replace("sses", "ss");
        else if (ends_with("ies")) replace("ies", "i");
        else if (ends_with("ss")) return;
        else if (ends_with("s")) replace("s", "");
    }

    void step1b() {
        if (ends_with("eed")) {
            if (measure(stem_len("eed")) > 0) replace("eed", "ee");
            return;
        }
        bool stripped = false;
        if (ends_with("ed") && has_vowel(stem_len("ed"))) {
            replace("ed", "");
            stripped = true;
        } else if (ends_with("ing") && has_vowel(stem_len("ing"))) {
            replace("ing", "");
            stripped = true;
        }
        if (!stripped) return;
        if (ends_with("at") || ends_with("bl") || ends_with("iz")) {
            w_ += 'e';
        } else if (double_consonant(w_.size())) {
            const char c = w_.back();
            if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
        } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
            w_ += 'e';
        }
    }

    void step1c() {
        if (ends_with("y") && has_vowel(w_.size() - 1)) w_.back() = 'i';
    }

    void step2() {
        static constexpr std::array<Rule, 20> rules = {{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        }};
        apply_longest(rules, [this](const Rule&, std::size_t len) { return measure(len) > 0; });
    }

    void step3() {
        static constexpr std::array<Rule, 7> rules = {{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        apply_longest(rules, [this](const Rule&, std::size_t len) { return measure(len) > 0; });
    }

    void step4() {
        static constexpr std::array<Rule, 19> rules = {{
            {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},   {"ic", ""},
            {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
            {"ent", ""},  {"ion", ""},  {"ou", ""},   {"ism", ""},  {"ate", ""},
            {"iti", ""},  {"ous", ""},  {"ive", ""},  {"ize", ""},
        }};
        apply_longest(rules, [this](const Rule& r, std::size_t len) {
            if (measure(len) <= 1) return false;
            if (r.suffix == "ion") return len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
            return true;
        });
    }

    void step5a() {
        if (!ends_with("e")) return;
        const auto len = w_.size() - 1;
        const int m = measure(len);
        if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
    }

    void step5b() {
        if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
    }

    std::string w_;
};

}  // namespace

std::string porter_stem(std::string_view word) { return PorterStemmer(word).run(); }

std::string stem(std::string_view word) {
    std::string current(word);
    for (;;) {
        auto next = porter_stem(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

}  // namespace cybok::text
