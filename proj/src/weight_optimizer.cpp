#include "escan/weight_optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

CitationGold CitationGold::load(const std::string& path) {
    CitationGold gold;
    for (const auto& line : tsv::read_lines(path)) {
        auto cols = tsv::split(line);
        if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
            throw IoError("bad citation row: " + line);
        }
        gold.by_measure[cols[0]].insert(cols[1]);
    }
    return gold;
}

const std::set<std::string>* CitationGold::citations(
    const std::string& measure_id) const {
    auto it = by_measure.find(measure_id);
    return it == by_measure.end() ? nullptr : &it->second;
}

double modified_mrr_from_ranks(std::vector<std::size_t> ranks, std::size_t M) {
    if (M == 0 || ranks.empty()) return 0.0;
    std::sort(ranks.begin(), ranks.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        sum += 1.0 / static_cast<double>(ranks[j] - j);
    }
    return sum / static_cast<double>(M);
}

double modified_mrr(const std::vector<std::pair<std::string, double>>& ranked,
                    const std::set<std::string>& gold, std::size_t M) {
    std::vector<std::size_t> ranks;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (gold.count(ranked[i].first)) ranks.push_back(i + 1);
    }
    return modified_mrr_from_ranks(std::move(ranks), M);
}

namespace {

constexpr std::size_t kGridSide = 11;
constexpr std::size_t kGridTotal =
    kGridSide * kGridSide * kGridSide * kGridSide * kGridSide;  // 161,051

WeightVector decode_grid_index(std::size_t idx) {
    WeightVector w;
    // Most significant digit is the keywords weight, so ascending index
    // order equals lexicographic weight order.
    for (std::size_t f = kFieldCount; f-- > 0;) {
        w.w[f] = static_cast<double>(idx % kGridSide) / 10.0;
        idx /= kGridSide;
    }
    return w;
}

// One measure flattened for the grid kernel. Candidate docs are ordered by
// doc_id, so index comparison doubles as the rank tie-break.
struct PreparedMeasure {
    std::vector<std::array<double, kFieldCount>> parts;  // per candidate doc
    std::array<double, kFieldCount> denominator{};
    std::array<bool, kFieldCount> active{};
    std::vector<std::size_t> gold_indices;
    std::size_t M = 0;
};

std::vector<PreparedMeasure> prepare(const std::vector<MeasureParts>& measures,
                                     const CitationGold& gold) {
    std::vector<PreparedMeasure> prepared;
    for (const MeasureParts& mp : measures) {
        const auto* cited = gold.citations(mp.measure_id);
        if (!cited || cited->empty()) continue;
        PreparedMeasure pm;
        pm.M = cited->size();
        std::set<std::string> candidates;
        for (Field f : kAllFields) {
            const auto& fp = mp.parts.field(f);
            for (const auto& [doc, num] : fp.numerator) candidates.insert(doc);
        }
        for (Field f : kAllFields) {
            auto fi = static_cast<std::size_t>(f);
            const auto& fp = mp.parts.field(f);
            pm.active[fi] = fp.denominator != 0.0 || !fp.numerator.empty();
            pm.denominator[fi] = fp.denominator;
        }
        std::size_t i = 0;
        for (const std::string& doc : candidates) {
            std::array<double, kFieldCount> row{};
            for (Field f : kAllFields) {
                auto fi = static_cast<std::size_t>(f);
                const auto& fp = mp.parts.field(f);
                auto it = fp.numerator.find(doc);
                row[fi] = it != fp.numerator.end() ? it->second
                                                   : fp.fill_numerator;
            }
            pm.parts.push_back(row);
            if (cited->count(doc)) pm.gold_indices.push_back(i);
            ++i;
        }
        prepared.push_back(std::move(pm));
    }
    if (prepared.empty()) {
        throw EmptyGoldError("no measure has gold citations");
    }
    return prepared;
}

double mean_mrr_at(const std::vector<PreparedMeasure>& prepared,
                   const WeightVector& w, std::vector<double>& scratch) {
    double sum = 0.0;
    for (const PreparedMeasure& pm : prepared) {
        scratch.clear();
        for (const auto& row : pm.parts) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t f = 0; f < kFieldCount; ++f) {
                if (!pm.active[f]) continue;
                num += w.w[f] * row[f];
                den += w.w[f] * w.w[f] * pm.denominator[f];
            }
            scratch.push_back(combine_score(num, den));
        }
        // Counting ranks avoids a full sort per grid point; equal scores
        // break toward the smaller doc index, matching recombine's order.
        std::vector<std::size_t> ranks;
        ranks.reserve(pm.gold_indices.size());
        for (std::size_t g : pm.gold_indices) {
            double sg = scratch[g];
            std::size_t rank = 1;
            for (std::size_t j = 0; j < scratch.size(); ++j) {
                if (scratch[j] > sg || (scratch[j] == sg && j < g)) ++rank;
            }
            ranks.push_back(rank);
        }
        sum += modified_mrr_from_ranks(std::move(ranks), pm.M);
    }
    return sum / static_cast<double>(prepared.size());
}

GridSearchResult run_grid(const std::vector<MeasureParts>& measures,
                          const CitationGold& gold, bool parallel) {
    std::vector<PreparedMeasure> prepared = prepare(measures, gold);
    GridSearchResult result;
    result.surface.resize(kGridTotal - 1);

    if (parallel) {
#pragma omp parallel
        {
            std::vector<double> scratch;
#pragma omp for schedule(static)
            for (long long k = 0; k < static_cast<long long>(kGridTotal - 1);
                 ++k) {
                WeightVector w =
                    decode_grid_index(static_cast<std::size_t>(k) + 1);
                result.surface[static_cast<std::size_t>(k)] = {
                    w, mean_mrr_at(prepared, w, scratch)};
            }
        }
    } else {
        std::vector<double> scratch;
        for (std::size_t k = 0; k < kGridTotal - 1; ++k) {
            WeightVector w = decode_grid_index(k + 1);
            result.surface[k] = {w, mean_mrr_at(prepared, w, scratch)};
        }
    }

    // Serial argmax over the surface keeps the result independent of the
    // thread count; first maximum wins, i.e. the lexicographically smallest
    // weight vector.
    std::size_t best = 0;
    for (std::size_t k = 1; k < result.surface.size(); ++k) {
        if (result.surface[k].mean_mrr > result.surface[best].mean_mrr) {
            best = k;
        }
    }
    result.best_weights = result.surface[best].weights;
    result.best_mean_mrr = result.surface[best].mean_mrr;
    return result;
}

}  // namespace

GridSearchResult grid_search(const std::vector<MeasureParts>& measures,
                             const CitationGold& gold) {
    return run_grid(measures, gold, true);
}

GridSearchResult grid_search_serial(const std::vector<MeasureParts>& measures,
                                    const CitationGold& gold) {
    return run_grid(measures, gold, false);
}

std::string surface_to_tsv(const std::vector<GridPoint>& surface) {
    std::string out =
        "w_keywords\tw_concepts\tw_expansions\tw_relations\tw_cqm_relations\t"
        "mean_mrr\n";
    for (const GridPoint& p : surface) {
        for (double w : p.weights.w) {
            out += tsv::fmt_double(w);
            out += '\t';
        }
        out += tsv::fmt_double(p.mean_mrr);
        out += '\n';
    }
    return out;
}

}  // namespace escan
