#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace escan {

// Word vectors in the common text format: a "count dimension" header line,
// then one token followed by `dimension` numbers per line, whitespace
// separated. Lookups fall back to the lowercased token.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    static EmbeddingTable load(const std::filesystem::path& path);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    const std::vector<double>* find(const std::string& token) const;

    // Mean of the in-vocabulary token vectors of the phrase. Throws
    // OutOfVocabularyError when no token is known or the mean has zero norm,
    // i.e. when a cosine comparison would be meaningless.
    std::vector<double> embed_phrase(const std::string& text) const;

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

// 1 − cosine similarity; inputs must have equal dimension and nonzero norm.
double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b);

}  // namespace escan
