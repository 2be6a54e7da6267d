#include "escan/text.hpp"

#include <cctype>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

bool is_word_byte(unsigned char c) {
    // Bytes >= 0x80 are kept inside tokens so UTF-8 sequences never split.
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_digit_byte(unsigned char c) { return std::isdigit(c) != 0; }

}  // namespace

Lemmatizer::Lemmatizer() {
    exceptions_ = {
        {"men", "man"},           {"women", "woman"},
        {"children", "child"},    {"feet", "foot"},
        {"teeth", "tooth"},       {"criteria", "criterion"},
        {"diagnoses", "diagnosis"}, {"analyses", "analysis"},
        {"diabetes", "diabetes"}, {"herpes", "herpes"},
        {"measles", "measles"},   {"series", "series"},
        {"given", "give"},        {"gave", "give"},
        {"taken", "take"},        {"took", "take"},
        {"undergone", "undergo"}, {"underwent", "undergo"},
        {"treated", "treat"},     {"treating", "treat"},
        {"is", "be"},             {"are", "be"},
        {"was", "be"},            {"were", "be"},
        {"been", "be"},           {"being", "be"},
        {"has", "have"},          {"had", "have"},
        {"does", "do"},           {"did", "do"},
        {"worse", "bad"},         {"worst", "bad"},
        {"better", "good"},       {"best", "good"},
    };
    // Ordered: plural endings, doubled-consonant inflections, endings that
    // restore a dropped "e", then the bare "ing"/"ed"/"s" strips.
    rules_ = {
        {"sses", "ss", 1},  {"zzes", "zz", 1},  {"ches", "ch", 1},
        {"shes", "sh", 1},  {"xes", "x", 1},    {"ies", "y", 2},
        {"ied", "y", 2},    {"ves", "ve", 2},

        {"nning", "n", 2},  {"tting", "t", 2},  {"pping", "p", 2},
        {"gging", "g", 2},  {"mming", "m", 2},  {"dding", "d", 2},
        {"rring", "r", 2},  {"bbing", "b", 2},  {"ssing", "ss", 2},
        {"nned", "n", 2},   {"tted", "t", 2},   {"pped", "p", 2},
        {"gged", "g", 2},   {"mmed", "m", 2},   {"dded", "d", 2},
        {"rred", "r", 2},   {"bbed", "b", 2},   {"ssed", "ss", 2},

        {"izing", "ize", 2}, {"ized", "ize", 2},
        {"ating", "ate", 4}, {"ated", "ate", 4},
        {"ving", "ve", 2},   {"ved", "ve", 2},
        {"sing", "se", 3},   {"sed", "se", 3},
        {"cing", "ce", 3},   {"ced", "ce", 3},
        {"ging", "ge", 3},   {"ged", "ge", 3},
        {"bing", "be", 4},   {"bed", "be", 4},

        {"ing", "", 3},      {"ed", "", 3},
        {"es", "e", 2},      {"s", "", 3},
    };
}

std::string Lemmatizer::lemma(std::string_view word) const {
    std::string w = tsv::to_lower(word);
    if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
    for (const auto& rule : rules_) {
        if (w.size() <= rule.suffix.size()) continue;
        std::size_t stem_len = w.size() - rule.suffix.size();
        if (stem_len < rule.min_stem) continue;
        if (w.compare(stem_len, rule.suffix.size(), rule.suffix) != 0) continue;
        // Plural strip must not fire on singulars that happen to end in
        // "-s": "status", "analysis", "class" keep their final letter.
        if (rule.suffix == "s") {
            char prev = w[stem_len - 1];
            if (prev == 's' || prev == 'u' || prev == 'i') continue;
        }
        return w.substr(0, stem_len) + rule.replacement;
    }
    return w;
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
    StopwordSet set;
    for (const auto& line : tsv::read_lines(path.string())) {
        std::string word = tsv::to_lower(line);
        // Trim surrounding spaces so hand-edited lists stay forgiving.
        std::size_t first = word.find_first_not_of(' ');
        std::size_t last = word.find_last_not_of(' ');
        if (first == std::string::npos) continue;
        set.insert(word.substr(first, last - first + 1));
    }
    return set;
}

void StopwordSet::insert(std::string word) { words_.insert(std::move(word)); }

bool StopwordSet::contains(std::string_view word) const {
    return words_.find(word) != words_.end();
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t sentence = 0;
    bool pending_break = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            if (pending_break && !tokens.empty()) ++sentence;
            pending_break = false;
            std::size_t begin = i;
            while (i < n) {
                unsigned char cur = static_cast<unsigned char>(text[i]);
                if (is_word_byte(cur)) {
                    ++i;
                    continue;
                }
                // Keep '.', '/', '-' between digits: "120/80", "3.5".
                if ((cur == '.' || cur == '/' || cur == '-') && i + 1 < n &&
                    i > begin &&
                    is_digit_byte(static_cast<unsigned char>(text[i - 1])) &&
                    is_digit_byte(static_cast<unsigned char>(text[i + 1]))) {
                    i += 2;
                    continue;
                }
                break;
            }
            Token tok;
            tok.surface = std::string(text.substr(begin, i - begin));
            tok.begin = begin;
            tok.end = i;
            tok.sentence = sentence;
            tokens.push_back(std::move(tok));
        } else {
            if (c == '.' || c == '!' || c == '?') pending_break = true;
            ++i;
        }
    }
    return tokens;
}

std::vector<Token> tokenize_lemmatize(std::string_view text,
                                      const Lemmatizer& lemmatizer,
                                      const StopwordSet& stopwords) {
    std::vector<Token> tokens = tokenize(text);
    for (Token& tok : tokens) {
        tok.lemma = lemmatizer.lemma(tok.surface);
        tok.is_stopword = stopwords.contains(tsv::to_lower(tok.surface)) ||
                          stopwords.contains(tok.lemma);
    }
    return tokens;
}

}  // namespace escan
