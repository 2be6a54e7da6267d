#include "escan/embedding.hpp"

#include <cmath>
#include <sstream>

#include "escan/errors.hpp"
#include "escan/text.hpp"
#include "escan/tsv.hpp"

namespace escan {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string word;
    while (in >> word) out.push_back(std::move(word));
    return out;
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
    EmbeddingTable table;
    auto lines = tsv::read_lines(path.string());
    if (lines.empty()) throw IoError("embedding file is empty: " + path.string());
    auto header = split_ws(lines[0]);
    if (header.size() != 2) {
        throw IoError("embedding file needs a 'count dimension' header: " +
                      path.string());
    }
    table.dimension_ = static_cast<std::size_t>(tsv::parse_long(header[1]));
    if (table.dimension_ == 0) {
        throw IoError("embedding dimension must be positive");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto parts = split_ws(lines[i]);
        if (parts.size() != table.dimension_ + 1) {
            throw IoError("embedding row has wrong width: " + lines[i]);
        }
        std::vector<double> vec(table.dimension_);
        for (std::size_t d = 0; d < table.dimension_; ++d) {
            vec[d] = tsv::parse_double(parts[d + 1]);
            if (!std::isfinite(vec[d])) {
                throw IoError("non-finite embedding value for token: " +
                              parts[0]);
            }
        }
        table.vectors_[parts[0]] = std::move(vec);
    }
    return table;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
    auto it = vectors_.find(token);
    if (it != vectors_.end()) return &it->second;
    it = vectors_.find(tsv::to_lower(token));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<double> EmbeddingTable::embed_phrase(const std::string& text) const {
    std::vector<double> mean(dimension_, 0.0);
    std::size_t hits = 0;
    for (const Token& tok : tokenize(text)) {
        const std::vector<double>* vec = find(tok.surface);
        if (!vec) continue;
        for (std::size_t d = 0; d < dimension_; ++d) mean[d] += (*vec)[d];
        ++hits;
    }
    if (hits == 0) {
        throw OutOfVocabularyError("no embedding for any token of: " + text);
    }
    double norm = 0.0;
    for (std::size_t d = 0; d < dimension_; ++d) {
        mean[d] /= static_cast<double>(hits);
        norm += mean[d] * mean[d];
    }
    if (norm == 0.0) {
        throw OutOfVocabularyError("zero-norm embedding for: " + text);
    }
    return mean;
}

double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        dot += a[d] * b[d];
        na += a[d] * a[d];
        nb += b[d] * b[d];
    }
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace escan
