#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace escan {

// One token of input text. Offsets are byte positions into the original
// document text, end exclusive. Stopwords are flagged, never removed, so
// relation rules can still anchor on them.
struct Token {
    std::string surface;
    std::string lemma;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t sentence = 0;
    bool is_stopword = false;
};

// Suffix-rule lemmatizer with an exception table for irregular forms.
// Rules are tried in order; the first rule whose suffix matches and whose
// remaining stem is long enough wins. Words it does not recognize pass
// through lowercased.
class Lemmatizer {
public:
    Lemmatizer();

    std::string lemma(std::string_view word) const;

private:
    struct Rule {
        std::string suffix;
        std::string replacement;
        std::size_t min_stem;
    };

    std::unordered_map<std::string, std::string> exceptions_;
    std::vector<Rule> rules_;
};

class StopwordSet {
public:
    StopwordSet() = default;

    // One word per line; blank lines and '#' comments ignored.
    static StopwordSet load(const std::filesystem::path& path);

    void insert(std::string word);
    bool contains(std::string_view word) const;
    std::size_t size() const { return words_.size(); }

private:
    std::set<std::string, std::less<>> words_;
};

// Splits text into tokens with byte offsets and sentence numbers. A token is
// a maximal run of alphanumeric bytes; '.', '/', and '-' are kept inside a
// token when both neighbours are digits ("120/80", "3.5"). Sentence numbers
// start at 0 and advance at '.', '!' or '?' separators.
std::vector<Token> tokenize(std::string_view text);

// tokenize() plus lemma assignment and stopword flagging. The stopword check
// is run against both the lowercased surface and the lemma.
std::vector<Token> tokenize_lemmatize(std::string_view text,
                                      const Lemmatizer& lemmatizer,
                                      const StopwordSet& stopwords);

}  // namespace escan
