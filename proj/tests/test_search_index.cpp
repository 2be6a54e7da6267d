#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "escan/errors.hpp"
#include "escan/fielded_document.hpp"
#include "escan/search_index.hpp"
#include "escan/tsv.hpp"

using namespace escan;
namespace fs = std::filesystem;

namespace {

FieldedDocument doc_of(const std::string& id,
                       std::initializer_list<std::pair<Field, std::pair<const char*, double>>>
                           terms) {
    FieldedDocument d;
    d.doc_id = id;
    for (const auto& [f, tw] : terms) d.add(f, tw.first, tw.second);
    return d;
}

// Straight transcription of the scoring contract, computed independently of
// the library's factored form.
double oracle_score(const Query& q, const std::string& doc_id,
                    const WeightVector& w, const FieldIndex& index) {
    double num = 0.0, den = 0.0;
    for (Field f : kAllFields) {
        std::vector<std::pair<std::string, double>> valid;
        for (const auto& [term, value] : q.field(f)) {
            if (index.df(f, term) > 0) valid.emplace_back(term, value);
        }
        if (valid.empty()) continue;
        double size = index.field_size(f, doc_id);
        double norm = size > 0 ? 1.0 / std::sqrt(size) : 0.0;
        std::size_t matched = 0;
        double sum = 0.0, dsum = 0.0;
        for (const auto& [term, value] : valid) {
            double idf = index.idf(f, term);
            double tf = index.tf(f, term, doc_id);
            if (tf > 0) ++matched;
            sum += value * tf * idf * idf;
            dsum += (value * idf) * (value * idf);
        }
        double coord = static_cast<double>(matched) / valid.size();
        num += w[f] * coord * norm * sum;
        den += w[f] * w[f] * dsum;
    }
    return den > 0 ? num / std::sqrt(den) : 0.0;
}

// Three-document corpus with full structure in two fields.
std::vector<FieldedDocument> small_corpus() {
    std::vector<FieldedDocument> docs;
    FieldedDocument a;
    a.doc_id = "DA";
    a.add(Field::Keywords, "aspirin", 3);
    a.add(Field::Keywords, "patient", 2);
    a.add(Field::Concepts, "aspirin", 3);
    a.add(Field::Concepts, "patients", 1);
    docs.push_back(a);
    FieldedDocument b;
    b.doc_id = "DB";
    b.add(Field::Keywords, "aspirin", 1);
    b.add(Field::Keywords, "stroke", 4);
    b.add(Field::Concepts, "stroke", 4);
    docs.push_back(b);
    FieldedDocument c;
    c.doc_id = "DC";
    c.add(Field::Keywords, "patient", 5);
    c.add(Field::Concepts, "patients", 5);
    docs.push_back(c);
    return docs;
}

Query query_of(std::initializer_list<std::pair<Field, std::pair<const char*, double>>>
                   terms) {
    FieldedDocument d;
    d.doc_id = "M";
    for (const auto& [f, tw] : terms) d.add(f, tw.first, tw.second);
    return Query::from_fielded(d);
}

}  // namespace

TEST_CASE("weight vectors parse, validate and print") {
    WeightVector w = WeightVector::parse("0.1,0.2,0.3,0.4,0.5");
    CHECK(w[Field::Keywords] == 0.1);
    CHECK(w[Field::CqmRelations] == 0.5);
    CHECK(WeightVector::parse(w.str()).w == w.w);

    CHECK_THROWS_AS(WeightVector::parse("0.1,0.2"), Error);
    CHECK_THROWS_AS(WeightVector::parse("0.1,0.2,0.3,0.4"), Error);
    CHECK_THROWS_AS(WeightVector::parse("0.1,0.2,0.3,0.4,0.5,0.6"), Error);
    CHECK_THROWS_AS(WeightVector::parse("1.1,0,0,0,0"), Error);
    CHECK_THROWS_AS(WeightVector::parse("-0.1,0,0,0,0.5"), Error);
    CHECK_THROWS_AS(WeightVector::parse("0,0,0,0,0"), Error);
    CHECK_THROWS_AS(WeightVector::parse("a,b,c,d,e"), Error);

    WeightVector zero;
    CHECK_THROWS_AS(zero.validate(), Error);
    zero[Field::Relations] = 0.2;
    CHECK_NOTHROW(zero.validate());
}

TEST_CASE("a query copies the measure's fielded term weights") {
    FieldedDocument m;
    m.doc_id = "CMS-1";
    m.add(Field::Keywords, "aspirin", 2);
    m.add(Field::CqmRelations, "patients|Experiences|aspirin");
    Query q = Query::from_fielded(m, "titles");
    CHECK(q.measure_id == "CMS-1");
    CHECK(q.target == "titles");
    CHECK(q.field(Field::Keywords).at("aspirin") == 2.0);
    CHECK(q.field(Field::CqmRelations).count("patients|Experiences|aspirin") == 1);
    CHECK(q.field(Field::Concepts).empty());
}

TEST_CASE("the index exposes df, tf, field sizes and idf") {
    FieldIndex index = FieldIndex::build(small_corpus());
    CHECK(index.doc_count() == 3);
    CHECK(index.has_doc("DA"));
    CHECK_FALSE(index.has_doc("DX"));

    CHECK(index.df(Field::Keywords, "aspirin") == 2);
    CHECK(index.df(Field::Keywords, "patient") == 2);
    CHECK(index.df(Field::Keywords, "stroke") == 1);
    CHECK(index.df(Field::Keywords, "nope") == 0);
    CHECK(index.df(Field::Concepts, "aspirin") == 1);

    CHECK(index.tf(Field::Keywords, "aspirin", "DA") == 3.0);
    CHECK(index.tf(Field::Keywords, "aspirin", "DC") == 0.0);
    CHECK(index.field_size(Field::Keywords, "DA") == 5.0);
    CHECK(index.field_size(Field::Concepts, "DB") == 4.0);
    CHECK(index.field_size(Field::Expansions, "DA") == 0.0);

    CHECK(index.idf(Field::Keywords, "aspirin") ==
          doctest::Approx(std::log(3.0 / 2.0)).epsilon(1e-15));
    CHECK(index.idf(Field::Keywords, "stroke") ==
          doctest::Approx(std::log(3.0)).epsilon(1e-15));

    const auto* post = index.postings(Field::Keywords, "aspirin");
    REQUIRE(post != nullptr);
    CHECK(post->size() == 2);
    CHECK(index.postings(Field::Keywords, "nope") == nullptr);
}

TEST_CASE("duplicate document ids cannot be indexed") {
    auto docs = small_corpus();
    docs.push_back(docs.front());
    CHECK_THROWS_AS(FieldIndex::build(docs), DuplicateDocError);
}

TEST_CASE("scoring matches an independent transcription of the formula") {
    FieldIndex index = FieldIndex::build(small_corpus());
    Query q = query_of({{Field::Keywords, {"aspirin", 1.0}},
                        {Field::Keywords, {"patient", 1.0}},
                        {Field::Concepts, {"patients", 2.0}}});
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        WeightVector w;
        for (Field f : kAllFields) w[f] = pick(rng);
        w[Field::Keywords] = std::max(w[Field::Keywords], 0.05);
        for (const std::string& id : {"DA", "DB", "DC"}) {
            CHECK(score(q, id, w, index) ==
                  doctest::Approx(oracle_score(q, id, w, index)).epsilon(1e-12));
        }
    }
}

TEST_CASE("terms absent from the corpus do not affect the score") {
    FieldIndex index = FieldIndex::build(small_corpus());
    WeightVector w = WeightVector::parse("0.5,0.5,0.1,0.1,0.1");
    Query with = query_of({{Field::Keywords, {"aspirin", 1.0}},
                           {Field::Keywords, {"unseen-term", 9.0}}});
    Query without = query_of({{Field::Keywords, {"aspirin", 1.0}}});
    for (const std::string& id : {"DA", "DB", "DC"}) {
        CHECK(score(with, id, w, index) == score(without, id, w, index));
    }
}

TEST_CASE("a term in every document still counts toward coordination") {
    // "common" appears everywhere so its idf is zero, but it stays a valid
    // term: docs missing "rare" get coord 1/2 on a zero numerator.
    std::vector<FieldedDocument> docs;
    for (const std::string& id : {"D1", "D2", "D3"}) {
        FieldedDocument d;
        d.doc_id = id;
        d.add(Field::Keywords, "common", 1);
        if (id == "D1") d.add(Field::Keywords, "rare", 1);
        docs.push_back(d);
    }
    FieldIndex index = FieldIndex::build(docs);
    CHECK(index.idf(Field::Keywords, "common") == 0.0);
    Query q = query_of({{Field::Keywords, {"common", 1.0}},
                        {Field::Keywords, {"rare", 1.0}}});
    WeightVector w = WeightVector::parse("1,0,0,0,0");
    double idf = std::log(3.0);
    // D1: coord 1, norm 1/sqrt(2), numerator 1·idf².
    double expect = (1.0 * (1.0 / std::sqrt(2.0)) * idf * idf) /
                    std::sqrt(idf * idf);
    CHECK(score(q, "D1", w, index) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(score(q, "D2", w, index) == 0.0);
    CHECK(score(q, "D3", w, index) == 0.0);
}

TEST_CASE("scoring is invariant under uniform weight scaling") {
    FieldIndex index = FieldIndex::build(small_corpus());
    Query q = query_of({{Field::Keywords, {"aspirin", 1.0}},
                        {Field::Concepts, {"patients", 1.0}}});
    WeightVector w = WeightVector::parse("0.8,0.6,0.2,0.4,1");
    WeightVector half = w;
    for (Field f : kAllFields) half[f] = w[f] * 0.5;
    for (const std::string& id : {"DA", "DB", "DC"}) {
        CHECK(score(q, id, w, index) == score(q, id, half, index));
    }
}

TEST_CASE("scoring an unknown document fails") {
    FieldIndex index = FieldIndex::build(small_corpus());
    Query q = query_of({{Field::Keywords, {"aspirin", 1.0}}});
    WeightVector w = WeightVector::parse("1,0,0,0,0");
    CHECK_THROWS_AS(score(q, "missing", w, index), UnknownDocError);
}

TEST_CASE("the decomposition recombines to the exact scores") {
    // Every document matches a shared term in every field, so every document
    // is retained everywhere and no fill value is used.
    std::vector<FieldedDocument> docs;
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> tf_pick(1, 6);
    for (int i = 0; i < 12; ++i) {
        FieldedDocument d;
        d.doc_id = "D" + std::to_string(100 + i);
        for (Field f : kAllFields) {
            d.add(f, "shared", tf_pick(rng));
            if (i % 2 == 0) d.add(f, "even", tf_pick(rng));
            if (i % 3 == 0) d.add(f, "third", tf_pick(rng));
        }
        docs.push_back(d);
    }
    FieldIndex index = FieldIndex::build(docs);
    Query q = query_of({{Field::Keywords, {"shared", 1.0}},
                        {Field::Keywords, {"even", 2.0}},
                        {Field::Concepts, {"shared", 1.0}},
                        {Field::Concepts, {"third", 1.0}},
                        {Field::Expansions, {"shared", 0.5}},
                        {Field::Relations, {"shared", 1.0}},
                        {Field::CqmRelations, {"shared", 1.0}},
                        {Field::CqmRelations, {"even", 3.0}}});
    ScoreParts parts = compute_score_parts(q, index);
    std::mt19937 wrng(99);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        WeightVector w;
        for (Field f : kAllFields) w[f] = pick(wrng);
        w[Field::Concepts] = std::max(w[Field::Concepts], 0.05);
        auto ranked = recombine(parts, w);
        REQUIRE(ranked.size() == docs.size());
        for (const auto& [id, s] : ranked) {
            CHECK(s == score(q, id, w, index));  // bitwise
        }
        for (std::size_t i = 1; i < ranked.size(); ++i) {
            bool ordered = ranked[i - 1].second > ranked[i].second ||
                           (ranked[i - 1].second == ranked[i].second &&
                            ranked[i - 1].first < ranked[i].first);
            CHECK(ordered);
        }
    }
}

TEST_CASE("a small cap retains the top documents and fills the rest") {
    // Keywords: tf 9/7/5/3 for D1..D4; concepts: tf 3/5/7/9 (reversed).
    std::vector<FieldedDocument> docs;
    const double kw_tf[] = {9, 7, 5, 3};
    const double co_tf[] = {3, 5, 7, 9};
    for (int i = 0; i < 4; ++i) {
        FieldedDocument d;
        d.doc_id = "D" + std::to_string(i + 1);
        d.add(Field::Keywords, "k", kw_tf[i]);
        d.add(Field::Keywords, "pad", 1);  // varies the field norm
        d.add(Field::Concepts, "c", co_tf[i]);
        docs.push_back(d);
    }
    // Give "k" and "c" idf > 0 by adding a fifth doc lacking both.
    FieldedDocument other;
    other.doc_id = "D9";
    other.add(Field::Keywords, "pad", 1);
    other.add(Field::Concepts, "unrelated", 1);
    docs.push_back(other);

    FieldIndex index = FieldIndex::build(docs);
    Query q = query_of({{Field::Keywords, {"k", 1.0}}, {Field::Concepts, {"c", 1.0}}});
    ScoreParts parts = compute_score_parts(q, index, 2);

    const auto& kw = parts.field(Field::Keywords);
    REQUIRE(kw.numerator.size() == 2);
    CHECK(kw.numerator.count("D1") == 1);
    CHECK(kw.numerator.count("D2") == 1);
    CHECK(kw.fill_numerator == kw.numerator.at("D2"));
    CHECK(kw.numerator.at("D1") > kw.numerator.at("D2"));

    const auto& co = parts.field(Field::Concepts);
    REQUIRE(co.numerator.size() == 2);
    CHECK(co.numerator.count("D4") == 1);
    CHECK(co.numerator.count("D3") == 1);
    CHECK(co.fill_numerator == co.numerator.at("D3"));

    WeightVector w = WeightVector::parse("0.7,0.3,0,0,0");
    auto ranked = recombine(parts, w);
    // Union of retained docs across fields.
    REQUIRE(ranked.size() == 4);
    for (const auto& [id, s] : ranked) {
        double kw_num = kw.numerator.count(id) ? kw.numerator.at(id) : kw.fill_numerator;
        double co_num = co.numerator.count(id) ? co.numerator.at(id) : co.fill_numerator;
        double expect = combine_score(
            w[Field::Keywords] * kw_num + w[Field::Concepts] * co_num,
            w[Field::Keywords] * w[Field::Keywords] * kw.denominator +
                w[Field::Concepts] * w[Field::Concepts] * co.denominator);
        CHECK(s == expect);
    }
}

TEST_CASE("scan returns the top k in rank order") {
    FieldIndex index = FieldIndex::build(small_corpus());
    Query q = query_of({{Field::Keywords, {"aspirin", 1.0}},
                        {Field::Concepts, {"patients", 1.0}}});
    WeightVector w = WeightVector::parse("0.5,0.5,0,0,0");
    auto all = scan(q, w, 10, index);
    auto top1 = scan(q, w, 1, index);
    REQUIRE(!all.empty());
    REQUIRE(top1.size() == 1);
    CHECK(top1[0].first == all[0].first);
    CHECK(top1[0].second == all[0].second);
    for (std::size_t i = 1; i < all.size(); ++i) {
        CHECK(all[i - 1].second >= all[i].second);
    }
}

TEST_CASE("an index round-trips through its snapshot file") {
    fs::path path = fs::temp_directory_path() / "escan_index_snapshot.tsv";
    FieldIndex index = FieldIndex::build(small_corpus(), "titles");
    index.save(path.string());
    FieldIndex reread = FieldIndex::load(path.string());
    CHECK(reread.doc_count() == index.doc_count());
    CHECK(reread.target() == "titles");
    Query q = query_of({{Field::Keywords, {"aspirin", 1.0}},
                        {Field::Keywords, {"patient", 1.0}},
                        {Field::Concepts, {"patients", 2.0}}});
    WeightVector w = WeightVector::parse("0.6,0.4,0.1,0.1,0.1");
    for (const std::string& id : {"DA", "DB", "DC"}) {
        CHECK(score(q, id, w, index) == score(q, id, w, reread));
    }
    fs::remove(path);
}

TEST_CASE("loading a missing or corrupt snapshot fails") {
    CHECK_THROWS_AS(FieldIndex::load("/nonexistent/escan_index.tsv"),
                    MissingIndexError);
    fs::path junk = fs::temp_directory_path() / "escan_index_junk.tsv";
    tsv::write_file(junk.string(), "not\tan\tindex\nrow\n");
    CHECK_THROWS_AS(FieldIndex::load(junk.string()), IoError);
    fs::remove(junk);
}
