#include "escan/search_index.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "escan/errors.hpp"
#include "escan/tsv.hpp"

namespace escan {

// ---------------------------------------------------------------------------
// WeightVector

WeightVector WeightVector::parse(const std::string& text) {
    WeightVector v;
    std::size_t start = 0;
    std::size_t i = 0;
    bool consumed = false;
    for (; i < kFieldCount; ++i) {
        auto comma = text.find(',', start);
        std::string part = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        v.w[i] = tsv::parse_double(part);
        if (comma == std::string::npos) {
            ++i;
            consumed = true;
            break;
        }
        start = comma + 1;
    }
    if (i != kFieldCount || !consumed) {
        throw Error("weights need exactly five comma-separated values: " + text);
    }
    v.validate();
    return v;
}

void WeightVector::validate() const {
    bool any = false;
    for (double x : w) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw Error("weights must lie in [0,1]: " + str());
        }
        if (x > 0.0) any = true;
    }
    if (!any) throw Error("weights must not all be zero");
}

std::string WeightVector::str() const {
    std::string out;
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        if (i) out += ',';
        out += tsv::fmt_double(w[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Query

Query Query::from_fielded(const FieldedDocument& measure_doc,
                          const std::string& target) {
    Query q;
    q.measure_id = measure_doc.doc_id;
    q.target = target;
    for (Field f : kAllFields) {
        q.values[static_cast<std::size_t>(f)] = measure_doc.field(f);
    }
    if (measure_doc.empty()) {
        throw Error("measure '" + q.measure_id + "' produced an empty query");
    }
    return q;
}

// ---------------------------------------------------------------------------
// FieldIndex

FieldIndex FieldIndex::build(const std::vector<FieldedDocument>& docs,
                             const std::string& target) {
    FieldIndex index;
    index.target_ = target;
    for (const FieldedDocument& doc : docs) {
        if (!index.docs_.insert(doc.doc_id).second) {
            throw DuplicateDocError("duplicate doc_id: " + doc.doc_id);
        }
        for (Field f : kAllFields) {
            auto fi = static_cast<std::size_t>(f);
            double size = 0.0;
            for (const auto& [term, tf] : doc.field(f)) {
                if (tf <= 0.0) continue;
                index.postings_[fi][term][doc.doc_id] = tf;
                size += tf;
            }
            if (size > 0.0) index.sizes_[fi][doc.doc_id] = size;
        }
    }
    return index;
}

std::size_t FieldIndex::df(Field f, const std::string& term) const {
    const auto& field_postings = postings_[static_cast<std::size_t>(f)];
    auto it = field_postings.find(term);
    return it == field_postings.end() ? 0 : it->second.size();
}

double FieldIndex::tf(Field f, const std::string& term,
                      const std::string& doc_id) const {
    const auto& field_postings = postings_[static_cast<std::size_t>(f)];
    auto it = field_postings.find(term);
    if (it == field_postings.end()) return 0.0;
    auto dit = it->second.find(doc_id);
    return dit == it->second.end() ? 0.0 : dit->second;
}

double FieldIndex::field_size(Field f, const std::string& doc_id) const {
    const auto& sizes = sizes_[static_cast<std::size_t>(f)];
    auto it = sizes.find(doc_id);
    return it == sizes.end() ? 0.0 : it->second;
}

double FieldIndex::idf(Field f, const std::string& term) const {
    return std::log(static_cast<double>(doc_count()) /
                    static_cast<double>(df(f, term)));
}

const std::map<std::string, double>* FieldIndex::postings(
    Field f, const std::string& term) const {
    const auto& field_postings = postings_[static_cast<std::size_t>(f)];
    auto it = field_postings.find(term);
    return it == field_postings.end() ? nullptr : &it->second;
}

void FieldIndex::save(const std::string& path) const {
    std::string out = "record\tfield\tterm\tdoc_id\tweight\n";
    out += "target\t" + target_ + "\t\t\t\n";
    for (const std::string& doc : docs_) {
        out += "doc\t\t\t" + doc + "\t\n";
    }
    for (Field f : kAllFields) {
        auto fi = static_cast<std::size_t>(f);
        for (const auto& [term, docs] : postings_[fi]) {
            for (const auto& [doc, tf] : docs) {
                out += tsv::join({"post", to_string(f), term, doc,
                                  tsv::fmt_double(tf)});
                out += '\n';
            }
        }
    }
    tsv::write_file(path, out);
}

FieldIndex FieldIndex::load(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw MissingIndexError("index snapshot not found: " + path);
    }
    FieldIndex index;
    bool first = true;
    for (const auto& line : tsv::read_lines(path)) {
        if (first) {  // header row
            first = false;
            continue;
        }
        auto cols = tsv::split(line);
        if (cols.empty()) continue;
        if (cols[0] == "target" && cols.size() >= 2) {
            index.target_ = cols[1];
        } else if (cols[0] == "doc" && cols.size() >= 4) {
            index.docs_.insert(cols[3]);
        } else if (cols[0] == "post" && cols.size() == 5) {
            Field f = field_from(cols[1]);
            auto fi = static_cast<std::size_t>(f);
            double tf = tsv::parse_double(cols[4]);
            index.postings_[fi][cols[2]][cols[3]] = tf;
            index.sizes_[fi][cols[3]] += tf;
        } else {
            throw IoError("bad index row: " + line);
        }
    }
    return index;
}

// ---------------------------------------------------------------------------
// Scoring

double combine_score(double numerator, double squared_denominator) {
    return squared_denominator > 0.0 ? numerator / std::sqrt(squared_denominator)
                                     : 0.0;
}

namespace {

// Field term sum, coord and fieldNorm for one (query, field, doc). Returns
// false when the field has no valid (df > 0) query term.
struct FieldScore {
    double part = 0.0;         // coord · fieldNorm · Σ value·tf·idf²
    double denominator = 0.0;  // Σ (value·idf)²
};

bool field_score(const Query& query, Field f, const std::string& doc_id,
                 const FieldIndex& index, FieldScore& out) {
    std::size_t valid = 0;
    std::size_t matched = 0;
    double term_sum = 0.0;
    double den = 0.0;
    for (const auto& [term, value] : query.field(f)) {
        std::size_t df = index.df(f, term);
        if (df == 0) continue;
        ++valid;
        double idf = index.idf(f, term);
        den += (value * idf) * (value * idf);
        double tf = index.tf(f, term, doc_id);
        if (tf > 0.0) {
            ++matched;
            term_sum += value * tf * idf * idf;
        }
    }
    if (valid == 0) return false;
    double coord =
        static_cast<double>(matched) / static_cast<double>(valid);
    double size = index.field_size(f, doc_id);
    double field_norm = size > 0.0 ? 1.0 / std::sqrt(size) : 0.0;
    out.part = coord * field_norm * term_sum;
    out.denominator = den;
    return true;
}

}  // namespace

double score(const Query& query, const std::string& doc_id,
             const WeightVector& weights, const FieldIndex& index) {
    if (!index.has_doc(doc_id)) {
        throw UnknownDocError("document not indexed: " + doc_id);
    }
    double num = 0.0;
    double den = 0.0;
    for (Field f : kAllFields) {
        FieldScore fs;
        if (!field_score(query, f, doc_id, index, fs)) continue;
        num += weights[f] * fs.part;
        den += weights[f] * weights[f] * fs.denominator;
    }
    return combine_score(num, den);
}

ScoreParts compute_score_parts(const Query& query, const FieldIndex& index,
                               std::size_t cap) {
    ScoreParts parts;
    for (Field f : kAllFields) {
        auto& fp = parts.fields[static_cast<std::size_t>(f)];
        // Per-document running term sum and matched-term count, accumulated
        // term-major in query order so sums match score() bit for bit.
        std::map<std::string, std::pair<double, std::size_t>> acc;
        std::size_t valid = 0;
        for (const auto& [term, value] : query.field(f)) {
            std::size_t df = index.df(f, term);
            if (df == 0) continue;
            ++valid;
            double idf = index.idf(f, term);
            fp.denominator += (value * idf) * (value * idf);
            for (const auto& [doc, tf] : *index.postings(f, term)) {
                auto& [sum, matched] = acc[doc];
                sum += value * tf * idf * idf;
                ++matched;
            }
        }
        if (valid == 0) continue;
        std::vector<std::pair<std::string, double>> nums;
        nums.reserve(acc.size());
        for (const auto& [doc, sm] : acc) {
            double coord = static_cast<double>(sm.second) /
                           static_cast<double>(valid);
            double size = index.field_size(f, doc);
            double field_norm = size > 0.0 ? 1.0 / std::sqrt(size) : 0.0;
            nums.emplace_back(doc, coord * field_norm * sm.first);
        }
        if (nums.size() > cap) {
            std::partial_sort(nums.begin(), nums.begin() + cap, nums.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.second != b.second)
                                      return a.second > b.second;
                                  return a.first < b.first;
                              });
            nums.resize(cap);
        }
        for (const auto& [doc, num] : nums) {
            fp.numerator.emplace(doc, num);
        }
        if (!fp.numerator.empty()) {
            double minimum = nums.front().second;
            for (const auto& [doc, num] : fp.numerator) {
                minimum = std::min(minimum, num);
            }
            fp.fill_numerator = minimum;
        }
    }
    return parts;
}

std::vector<std::pair<std::string, double>> recombine(
    const ScoreParts& parts, const WeightVector& weights) {
    std::set<std::string> candidates;
    for (const auto& fp : parts.fields) {
        for (const auto& [doc, num] : fp.numerator) candidates.insert(doc);
    }
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(candidates.size());
    for (const std::string& doc : candidates) {
        double num = 0.0;
        double den = 0.0;
        for (Field f : kAllFields) {
            const auto& fp = parts.field(f);
            if (fp.denominator == 0.0 && fp.numerator.empty()) continue;
            auto it = fp.numerator.find(doc);
            double part = it != fp.numerator.end() ? it->second
                                                   : fp.fill_numerator;
            num += weights[f] * part;
            den += weights[f] * weights[f] * fp.denominator;
        }
        ranked.emplace_back(doc, combine_score(num, den));
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    return ranked;
}

std::vector<std::pair<std::string, double>> scan(const Query& query,
                                                 const WeightVector& weights,
                                                 std::size_t k,
                                                 const FieldIndex& index) {
    auto ranked = recombine(compute_score_parts(query, index), weights);
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace escan
