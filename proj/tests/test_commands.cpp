#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "escan/commands.hpp"
#include "escan/errors.hpp"
#include "escan/evaluate.hpp"
#include "escan/triple_store.hpp"
#include "escan/tsv.hpp"

using namespace escan;
namespace fs = std::filesystem;

namespace {

const std::string kResources{ESCAN_RESOURCE_DIR};
const std::string kTestdata{ESCAN_TESTDATA_DIR};

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

// Runs ingest + index once for the tests that only read the outputs.
struct Pipeline {
    TempDir dir{"escan_cmd_pipeline"};
    IngestStats stats;
    std::ostringstream log;

    Pipeline() {
        stats = run_ingest(kTestdata + "/mini_corpus.tsv", kResources,
                           dir.file("fielded.tsv"), dir.file("triples.tsv"), log);
        run_index(dir.file("fielded.tsv"), dir.file("index.tsv"), "abstracts");
    }
};

Pipeline& pipeline() {
    static Pipeline p;
    return p;
}

std::vector<std::string> ranked_ids(const std::string& scan_out) {
    return load_ranked_doc_ids(scan_out);
}

const std::vector<std::string> kDocsWithTriples = {
    "D001", "D002", "D003", "D004", "D005", "D006", "D007",
    "D008", "D011", "D012", "D013", "D014", "D016", "D018"};

}  // namespace

TEST_CASE("the measure file loads with full concept instances") {
    auto measures = load_measures(kTestdata + "/measures.tsv");
    REQUIRE(measures.size() == 3);
    CHECK(measures[0].measure_id == "4");
    CHECK(measures[0].description ==
          "Acute myocardial infarction (AMI) patients who are prescribed "
          "aspirin at hospital discharge");
    CHECK(measures[0].instance.population == "Patients");
    CHECK(measures[0].instance.denominator_health_status ==
          "Acute myocardial infarction");
    CHECK(measures[0].instance.change_concept == "Aspirin");
    CHECK(measures[0].instance.numerator_health_status == "Mortality");
    CHECK(measures[0].instance.output == "Reduce");
    CHECK(measures[0].instance.utilization == "Hospital discharge");
    CHECK(measures[1].measure_id == "101");
    CHECK(measures[1].instance.utilization.empty());
    CHECK(measures[2].measure_id == "102");
    CHECK(measures[2].instance.utilization.empty());
}

TEST_CASE("measure rows are validated on load") {
    TempDir dir{"escan_cmd_measures"};
    tsv::write_file(dir.file("two.tsv"), "m1\tshort description\n");
    auto two = load_measures(dir.file("two.tsv"));
    REQUIRE(two.size() == 1);
    CHECK(two[0].instance.population.empty());

    tsv::write_file(dir.file("dup.tsv"), "m1\ta\nm1\tb\n");
    CHECK_THROWS_AS(load_measures(dir.file("dup.tsv")), IoError);

    tsv::write_file(dir.file("three.tsv"), "m1\ta\textra\n");
    CHECK_THROWS_AS(load_measures(dir.file("three.tsv")), IoError);

    tsv::write_file(dir.file("empty.tsv"), "# only a comment\n");
    CHECK_THROWS_AS(load_measures(dir.file("empty.tsv")), IoError);
}

TEST_CASE("measure selection by id and by default") {
    auto measures = load_measures(kTestdata + "/measures.tsv");
    CHECK(select_measure(measures, std::string("101")).measure_id == "101");
    CHECK_THROWS_AS(select_measure(measures, std::nullopt), Error);
    CHECK_THROWS_AS(select_measure(measures, std::string("777")), Error);

    std::vector<MeasureRecord> solo = {measures[0]};
    CHECK(select_measure(solo, std::nullopt).measure_id == "4");
}

TEST_CASE("the default weights are a valid vector") {
    CHECK_NOTHROW(default_weights().validate());
}

TEST_CASE("ingest processes the whole sample corpus") {
    Pipeline& p = pipeline();
    CHECK(p.stats.succeeded == 20);
    CHECK(p.stats.skipped == 0);
    CHECK(p.log.str().empty());

    auto docs = load_fielded_docs(p.dir.file("fielded.tsv"));
    CHECK(docs.size() == 20);

    TripleStore store = TripleStore::open(p.dir.file("triples.tsv"));
    CHECK(store.doc_ids() == kDocsWithTriples);
}

TEST_CASE("ingest skips malformed and duplicate records") {
    TempDir dir{"escan_cmd_badcorpus"};
    tsv::write_file(dir.file("corpus.tsv"),
                    "D1\tAspirin\tAspirin reduces mortality.\n"
                    "broken row without tabs\n"
                    "D1\tAgain\tPatients receiving aspirin were studied.\n"
                    "D2\tOk\tPatients suffering from diabetes were seen.\n");
    std::ostringstream log;
    IngestStats stats =
        run_ingest(dir.file("corpus.tsv"), kResources, dir.file("fielded.tsv"),
                   dir.file("triples.tsv"), log);
    CHECK(stats.succeeded == 2);
    CHECK(stats.skipped == 2);
    std::string logged = log.str();
    CHECK(logged.find("malformed") != std::string::npos);
    CHECK(logged.find("duplicate doc_id D1") != std::string::npos);
}

TEST_CASE("ingest with no usable record fails") {
    TempDir dir{"escan_cmd_nocorpus"};
    tsv::write_file(dir.file("corpus.tsv"), "only one column\n");
    std::ostringstream log;
    CHECK_THROWS_AS(run_ingest(dir.file("corpus.tsv"), kResources,
                               dir.file("f.tsv"), dir.file("t.tsv"), log),
                    IoError);
}

TEST_CASE("ingest output is reproducible byte for byte") {
    TempDir dir{"escan_cmd_repro"};
    std::ostringstream log;
    run_ingest(kTestdata + "/mini_corpus.tsv", kResources, dir.file("f1.tsv"),
               dir.file("t1.tsv"), log);
    run_ingest(kTestdata + "/mini_corpus.tsv", kResources, dir.file("f2.tsv"),
               dir.file("t2.tsv"), log);
    CHECK(tsv::read_file(dir.file("f1.tsv")) == tsv::read_file(dir.file("f2.tsv")));
    CHECK(tsv::read_file(dir.file("t1.tsv")) == tsv::read_file(dir.file("t2.tsv")));
}

TEST_CASE("scanning ranks the cited aspirin documents on top") {
    Pipeline& p = pipeline();
    run_scan(p.dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
             std::string("4"), default_weights(), 5, p.dir.file("scan4.tsv"));
    auto ids = ranked_ids(p.dir.file("scan4.tsv"));
    REQUIRE(ids.size() == 5);
    std::set<std::string> top2(ids.begin(), ids.begin() + 2);
    CHECK(top2 == std::set<std::string>{"D001", "D002"});
    for (const std::string& id : ids) {
        CHECK(id < "D011");  // none of the off-topic tail documents
    }

    std::string report = tsv::read_file(p.dir.file("scan4.tsv"));
    CHECK(report.rfind("rank\tdoc_id\tscore\n", 0) == 0);
}

TEST_CASE("scanning finds the single best document for the other measures") {
    Pipeline& p = pipeline();
    run_scan(p.dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
             std::string("101"), default_weights(), 3, p.dir.file("scan101.tsv"));
    CHECK(ranked_ids(p.dir.file("scan101.tsv")).front() == "D006");

    run_scan(p.dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
             std::string("102"), default_weights(), 3, p.dir.file("scan102.tsv"));
    CHECK(ranked_ids(p.dir.file("scan102.tsv")).front() == "D007");
}

TEST_CASE("scanning an unknown measure or an empty index fails") {
    Pipeline& p = pipeline();
    CHECK_THROWS_AS(
        run_scan(p.dir.file("index.tsv"), kResources,
                 kTestdata + "/measures.tsv", std::string("777"),
                 default_weights(), 5, p.dir.file("nope.tsv")),
        Error);

    TempDir dir{"escan_cmd_emptyindex"};
    save_fielded_docs(dir.file("fielded.tsv"), {});
    run_index(dir.file("fielded.tsv"), dir.file("index.tsv"), "abstracts");
    CHECK_THROWS_AS(
        run_scan(dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
                 std::string("4"), default_weights(), 5, dir.file("nope.tsv")),
        MissingIndexError);
}

TEST_CASE("matching the sample corpus reproduces the adjudicated verdicts") {
    Pipeline& p = pipeline();
    std::ostringstream warnings;
    run_match(p.dir.file("triples.tsv"), kResources, kTestdata + "/measures.tsv",
              std::nullopt, std::nullopt, kResources + "/embeddings.txt", 0.6,
              0.0, p.dir.file("verdicts.tsv"), warnings);
    CHECK(tsv::read_file(p.dir.file("verdicts.tsv")) ==
          tsv::read_file(kTestdata + "/expected_verdicts.tsv"));
    // The statin document can only be judged by embeddings it lacks.
    CHECK(warnings.str().find("warning: D013") != std::string::npos);

    auto rows = load_verdicts(p.dir.file("verdicts.tsv"));
    CHECK(rows.size() == 3 * kDocsWithTriples.size());
    for (const VerdictRow& row : rows) {
        if (row.stringent) CHECK(row.relevant);
        CHECK(row.relevant ==
              (row.numerator || row.denominator || row.opportunity));
        CHECK(row.stringent ==
              (row.numerator && row.denominator && row.opportunity));
    }
}

TEST_CASE("matching a ranked report judges those documents in rank order") {
    Pipeline& p = pipeline();
    run_scan(p.dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
             std::string("4"), default_weights(), 5, p.dir.file("scan4b.tsv"));
    auto order = ranked_ids(p.dir.file("scan4b.tsv"));
    std::ostringstream warnings;
    run_match(p.dir.file("triples.tsv"), kResources, kTestdata + "/measures.tsv",
              std::string("4"), p.dir.file("scan4b.tsv"),
              kResources + "/embeddings.txt", 0.6, 0.0,
              p.dir.file("verdicts_ranked.tsv"), warnings);
    auto rows = load_verdicts(p.dir.file("verdicts_ranked.tsv"));
    REQUIRE(rows.size() == order.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].measure_id == "4");
        CHECK(rows[i].doc_id == order[i]);
    }
}

TEST_CASE("a confidence floor prunes low-confidence graph edges") {
    Pipeline& p = pipeline();
    std::ostringstream warnings;
    // At a floor above every derived confidence all graphs are empty, so
    // nothing is relevant.
    run_match(p.dir.file("triples.tsv"), kResources, kTestdata + "/measures.tsv",
              std::string("4"), std::nullopt, kResources + "/embeddings.txt",
              0.6, 1.01, p.dir.file("verdicts_floor.tsv"), warnings);
    auto rows = load_verdicts(p.dir.file("verdicts_floor.tsv"));
    REQUIRE(!rows.empty());
    for (const VerdictRow& row : rows) CHECK_FALSE(row.relevant);
}

TEST_CASE("optimization writes one tuned weight row") {
    Pipeline& p = pipeline();
    run_optimize(p.dir.file("index.tsv"), kResources, kTestdata + "/measures.tsv",
                 kTestdata + "/gold_citations.tsv", p.dir.file("weights.tsv"),
                 std::nullopt);
    auto lines = tsv::read_lines(p.dir.file("weights.tsv"));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "w_keywords\tw_concepts\tw_expansions\tw_relations\tw_cqm_relations\t"
          "mean_mrr");
    auto cols = tsv::split(lines[1]);
    REQUIRE(cols.size() == 6);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        double w = tsv::parse_double(cols[i]);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        sum += w;
    }
    CHECK(sum > 0.0);
    double mrr = tsv::parse_double(cols[5]);
    CHECK(mrr > 0.0);
    CHECK(mrr <= 1.0);
}

TEST_CASE("evaluation reports agreement with the manual review") {
    TempDir dir{"escan_cmd_eval"};
    run_evaluate(kTestdata + "/a2_verdicts.tsv", kTestdata + "/a2_manual.tsv",
                 30, dir.file("eval.tsv"));
    auto lines = tsv::read_lines(dir.file("eval.tsv"));
    REQUIRE(lines.size() == 3);  // header, measure 4, MEAN
    auto cols = tsv::split(lines[1]);
    REQUIRE(cols.size() == 7);
    CHECK(cols[0] == "4");
    CHECK(cols[1] == "25");  // auto relevant
    CHECK(cols[2] == "24");  // manual relevant
    CHECK(cols[3] == "22");  // agreed
    CHECK(tsv::parse_double(cols[4]) == doctest::Approx(22.0 / 25.0).epsilon(1e-12));
    CHECK(tsv::parse_double(cols[5]) == doctest::Approx(22.0 / 24.0).epsilon(1e-12));
    CHECK(tsv::parse_double(cols[6]) == doctest::Approx(25.0 / 30.0).epsilon(1e-12));
    auto mean = tsv::split(lines[2]);
    CHECK(mean[0] == "MEAN");
    CHECK(tsv::parse_double(mean[4]) == doctest::Approx(22.0 / 25.0).epsilon(1e-12));
}

TEST_CASE("evaluation demands a manual truth file with rows") {
    TempDir dir{"escan_cmd_evalempty"};
    tsv::write_file(dir.file("manual.tsv"), "# no adjudications yet\n");
    CHECK_THROWS_AS(run_evaluate(kTestdata + "/a2_verdicts.tsv",
                                 dir.file("manual.tsv"), 30,
                                 dir.file("eval.tsv")),
                    EmptyManualError);
}

TEST_CASE("matching without a triple store fails cleanly") {
    std::ostringstream warnings;
    CHECK_THROWS_AS(
        run_match("/nonexistent/triples.tsv", kResources,
                  kTestdata + "/measures.tsv", std::nullopt, std::nullopt,
                  kResources + "/embeddings.txt", 0.6, 0.0,
                  (fs::temp_directory_path() / "escan_nope.tsv").string(),
                  warnings),
        IoError);
}
