#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "escan/search_index.hpp"

namespace escan {

// Known cited documents per measure. File format: measure_id TAB doc_id.
struct CitationGold {
    std::map<std::string, std::set<std::string>> by_measure;

    static CitationGold load(const std::string& path);

    // nullptr when the measure has no citations.
    const std::set<std::string>* citations(const std::string& measure_id) const;
};

// Reciprocal-rank credit discounted by how many cited documents already
// appeared: v = (1/M) Σ_{j=1..m} 1/(ρ_j − j + 1) with the m found gold ranks
// ρ_j ascending and M the full citation count. No gold found → 0.
double modified_mrr_from_ranks(std::vector<std::size_t> ranks, std::size_t M);

// Ranks are the 1-based positions of gold docs in `ranked` (descending
// score order as produced by recombine/scan).
double modified_mrr(const std::vector<std::pair<std::string, double>>& ranked,
                    const std::set<std::string>& gold, std::size_t M);

struct MeasureParts {
    std::string measure_id;
    ScoreParts parts;
};

struct GridPoint {
    WeightVector weights;
    double mean_mrr = 0.0;
};

struct GridSearchResult {
    WeightVector best_weights;
    double best_mean_mrr = 0.0;
    std::vector<GridPoint> surface;  // every non-zero grid point, in
                                     // lexicographic weight order
};

// Exhaustive search over the 11^5 − 1 non-zero weight vectors with step 0.1,
// maximizing the mean modified MRR over the measures that have citations.
// Scoring reuses the precomputed decompositions only — the index is never
// consulted — through the same combine_score() path as recombine, so grid
// scores equal recombine scores bit for bit. Ties pick the lexicographically
// smallest weight vector. Measures without citations are skipped; if none
// remain, EmptyGoldError.
GridSearchResult grid_search(const std::vector<MeasureParts>& measures,
                             const CitationGold& gold);

// Single-threaded reference implementation; must produce identical results.
GridSearchResult grid_search_serial(const std::vector<MeasureParts>& measures,
                                    const CitationGold& gold);

std::string surface_to_tsv(const std::vector<GridPoint>& surface);

}  // namespace escan
