#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "escan/fielded_document.hpp"

namespace escan {

// Per-field boost weights, in Field order: keywords, concepts, expansions,
// relations, cqm_relations. Each weight lies in [0,1]; at least one nonzero.
struct WeightVector {
    std::array<double, kFieldCount> w{};

    double operator[](Field f) const { return w[static_cast<std::size_t>(f)]; }
    double& operator[](Field f) { return w[static_cast<std::size_t>(f)]; }

    // Parses "w1,w2,w3,w4,w5"; validates range and the not-all-zero rule.
    static WeightVector parse(const std::string& text);
    void validate() const;
    std::string str() const;  // comma-joined, shortest round-trip
};

// A measure turned into a five-field term query. value(t) is the term's
// weight in the measure's own fielded document.
struct Query {
    std::string measure_id;
    std::array<std::map<std::string, double>, kFieldCount> values;
    std::string target = "abstracts";  // descriptive corpus tag

    const std::map<std::string, double>& field(Field f) const {
        return values[static_cast<std::size_t>(f)];
    }

    static Query from_fielded(const FieldedDocument& measure_doc,
                              const std::string& target = "abstracts");
};

// Inverted index over the five fields. Immutable once built; save/load
// round-trips through a tagged TSV snapshot.
class FieldIndex {
public:
    FieldIndex() = default;

    static FieldIndex build(const std::vector<FieldedDocument>& docs,
                            const std::string& target = "abstracts");
    static FieldIndex load(const std::string& path);
    void save(const std::string& path) const;

    std::size_t doc_count() const { return docs_.size(); }
    bool has_doc(const std::string& doc_id) const { return docs_.count(doc_id) > 0; }
    const std::set<std::string>& docs() const { return docs_; }
    const std::string& target() const { return target_; }

    // Documents containing the term in that field (0 when unseen).
    std::size_t df(Field f, const std::string& term) const;
    double tf(Field f, const std::string& term, const std::string& doc_id) const;
    // Total term mass of the document's field (sum of tf values).
    double field_size(Field f, const std::string& doc_id) const;
    // ln(N / df); caller guarantees df > 0.
    double idf(Field f, const std::string& term) const;

    const std::map<std::string, double>* postings(Field f,
                                                  const std::string& term) const;

private:
    std::array<std::map<std::string, std::map<std::string, double>>, kFieldCount>
        postings_;                                      // field → term → doc → tf
    std::array<std::map<std::string, double>, kFieldCount> sizes_;  // field → doc → Σtf
    std::set<std::string> docs_;
    std::string target_ = "abstracts";
};

// The weight-independent decomposition of the scoring function. For every
// field: numerator_part(d) = coord · fieldNorm · Σ_t value·tf·idf² over the
// documents matching at least one valid query term (capped to the largest
// `cap` by numerator, ties to the smaller doc_id), denominator_part =
// Σ_t (value·idf)², and fill_numerator = the smallest retained numerator,
// substituted for documents absent from the field's retained set.
struct ScoreParts {
    struct FieldParts {
        std::map<std::string, double> numerator;  // retained docs only
        double denominator = 0.0;
        double fill_numerator = 0.0;
    };
    std::array<FieldParts, kFieldCount> fields;

    const FieldParts& field(Field f) const {
        return fields[static_cast<std::size_t>(f)];
    }
};

inline constexpr std::size_t kRetainedPerField = 1000;

// Recombination shared by recombine() and the grid search so both produce
// bit-identical scores.
double combine_score(double numerator, double squared_denominator);

// Full scoring of one indexed document. Per field with at least one valid
// (df > 0) query term: numerator += weight·coord·fieldNorm·Σ value·tf·idf²
// and denominator += weight²·Σ (value·idf)²; the result is
// numerator / sqrt(denominator), or 0 when the denominator vanishes.
// Unknown doc_id throws UnknownDocError.
double score(const Query& query, const std::string& doc_id,
             const WeightVector& weights, const FieldIndex& index);

ScoreParts compute_score_parts(const Query& query, const FieldIndex& index,
                               std::size_t cap = kRetainedPerField);

// Scores the union of retained documents under the given weights and sorts
// descending, ties by ascending doc_id.
std::vector<std::pair<std::string, double>> recombine(
    const ScoreParts& parts, const WeightVector& weights);

// First k of recombine on a freshly computed decomposition.
std::vector<std::pair<std::string, double>> scan(const Query& query,
                                                 const WeightVector& weights,
                                                 std::size_t k,
                                                 const FieldIndex& index);

}  // namespace escan
